#include "aisplan/lp.hpp"

#include "aisplan/error.hpp"

#include <cmath>
#include <limits>

namespace aisplan {

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b) {
    const std::size_t n = c.size(), m = b.size();
    if (A.size() != n * m) throw ModelError("lp: constraint matrix has wrong size");
    const std::size_t w = n + m + 1; // columns: x, slacks, rhs
    std::vector<double> tab((m + 1) * w, 0.0);
    auto T = [&](std::size_t r, std::size_t col) -> double& { return tab[r * w + col]; };
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (b[r] < 0) throw ModelError("lp: negative right-hand side");
        for (std::size_t j = 0; j < n; ++j) T(r, j) = A[r * n + j];
        T(r, n + r) = 1.0;
        T(r, w - 1) = b[r];
        basis[r] = n + r;
    }
    for (std::size_t j = 0; j < n; ++j) T(m, j) = -c[j];

    constexpr double eps = 1e-12;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > 50'000) throw NumericalError("lp: iteration limit reached");
        std::size_t enter = w;
        for (std::size_t j = 0; j + 1 < w; ++j)
            if (T(m, j) < -eps) {
                enter = j;
                break;
            }
        if (enter == w) break;
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            double a = T(r, enter);
            if (a <= eps) continue;
            double ratio = T(r, w - 1) / a;
            if (ratio < best - eps || (leave != m && std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave == m) throw NumericalError("lp: unbounded objective");
        double piv = T(leave, enter);
        for (std::size_t j = 0; j < w; ++j) T(leave, j) /= piv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave) continue;
            double f = T(r, enter);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) T(r, j) -= f * T(leave, j);
        }
        basis[leave] = enter;
    }
    LpResult res;
    res.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < n) res.x[basis[r]] = T(r, w - 1);
    res.value = 0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

} // namespace aisplan
