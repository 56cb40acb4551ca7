#include "aisplan/ais.hpp"
#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aisplan {

ProbVector lattice_quantize(const ProbVector& b, std::size_t n) {
    if (n == 0) throw ModelError("lattice resolution must be at least 1");
    const std::size_t m = b.size();
    std::vector<long long> k(m);
    std::vector<double> frac(m);
    long long used = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double x = b[i] * static_cast<double>(n);
        double f = std::floor(x);
        k[i] = static_cast<long long>(f);
        frac[i] = x - f;
        used += k[i];
    }
    long long residual = static_cast<long long>(n) - used;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    // Largest fractional part first; among ties the later coordinate first,
    // which keeps the result lexicographically smallest.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (std::abs(frac[i] - frac[j]) > 1e-12) return frac[i] > frac[j];
        return i > j;
    });
    for (long long r = 0; r < residual && r < static_cast<long long>(m); ++r) ++k[order[r]];
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = static_cast<double>(k[i]) / static_cast<double>(n);
    return ProbVector(std::move(out));
}

double lattice_l1_error_bound(std::size_t m, std::size_t n) {
    double lo = std::floor(m / 2.0), hi = std::ceil(m / 2.0);
    return 2.0 * lo * hi / (static_cast<double>(m) * static_cast<double>(n));
}

std::size_t lattice_size(std::size_t m, std::size_t n) {
    // C(n + m - 1, m - 1), saturating.
    long double c = 1;
    for (std::size_t i = 1; i < m; ++i) {
        c = c * static_cast<long double>(n + i) / static_cast<long double>(i);
        if (c > 1e15L) return static_cast<std::size_t>(1e15);
    }
    return static_cast<std::size_t>(std::llround(static_cast<double>(c)));
}

std::vector<std::vector<double>> enumerate_lattice(std::size_t m, std::size_t n) {
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> k(m, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i + 1 == m) {
            k[i] = left;
            std::vector<double> p(m);
            for (std::size_t j = 0; j < m; ++j) p[j] = static_cast<double>(k[j]) / static_cast<double>(n);
            out.push_back(std::move(p));
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            k[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, n);
    return out;
}

} // namespace aisplan
