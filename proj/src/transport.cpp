#include "aisplan/transport.hpp"

#include "aisplan/error.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace aisplan {

namespace {

struct Cell {
    std::size_t i, j;
    double x;
};

} // namespace

TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::vector<double>& cost) {
    if (cost.size() != supply.size() * demand.size())
        throw ModelError("transport: cost matrix has wrong size");
    // Drop empty rows/columns.
    std::vector<std::size_t> rows, cols;
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < supply.size(); ++i) {
        if (supply[i] < 0) throw ModelError("transport: negative supply");
        if (supply[i] > 0) rows.push_back(i), sa += supply[i];
    }
    for (std::size_t j = 0; j < demand.size(); ++j) {
        if (demand[j] < 0) throw ModelError("transport: negative demand");
        if (demand[j] > 0) cols.push_back(j), sb += demand[j];
    }
    if (std::abs(sa - sb) > 1e-9) throw ModelError("transport: unbalanced problem");
    TransportPlan plan;
    if (rows.empty() || cols.empty()) return plan;

    const std::size_t n1 = rows.size(), n2 = cols.size();
    std::vector<double> a(n1), b(n2);
    for (std::size_t i = 0; i < n1; ++i) a[i] = supply[rows[i]];
    for (std::size_t j = 0; j < n2; ++j) b[j] = demand[cols[j]] * (sa / sb);
    auto C = [&](std::size_t i, std::size_t j) { return cost[rows[i] * demand.size() + cols[j]]; };

    // Northwest corner start: exactly n1 + n2 - 1 basic cells.
    std::vector<Cell> basis;
    {
        std::size_t i = 0, j = 0;
        std::vector<double> ra = a, rb = b;
        for (;;) {
            double x = std::min(ra[i], rb[j]);
            basis.push_back({i, j, x});
            ra[i] -= x;
            rb[j] -= x;
            if (i + 1 == n1 && j + 1 == n2) break;
            if (i + 1 == n1)
                ++j;
            else if (j + 1 == n2)
                ++i;
            else if (ra[i] <= rb[j])
                ++i;
            else
                ++j;
        }
    }

    double cmax = 0;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) cmax = std::max(cmax, std::abs(C(i, j)));
    const double tol = 1e-12 * std::max(1.0, cmax);
    const std::size_t nn = n1 + n2;
    std::vector<std::vector<std::size_t>> adj(nn);
    std::vector<double> pot(nn);
    std::vector<std::size_t> parent_cell(nn), parent_node(nn);
    std::vector<char> seen(nn);

    auto build_adj = [&] {
        for (auto& l : adj) l.clear();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            adj[basis[k].i].push_back(k);
            adj[n1 + basis[k].j].push_back(k);
        }
    };

    for (std::size_t iter = 0;; ++iter) {
        if (iter > 200'000) throw NumericalError("transport: iteration limit reached");
        build_adj();
        // Potentials: u_i + v_j = C_ij on basic cells, u_0 = 0.
        std::fill(seen.begin(), seen.end(), 0);
        std::deque<std::size_t> q{0};
        seen[0] = 1;
        pot[0] = 0;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop_front();
            for (std::size_t k : adj[v]) {
                std::size_t w = v < n1 ? n1 + basis[k].j : basis[k].i;
                if (seen[w]) continue;
                seen[w] = 1;
                pot[w] = C(basis[k].i, basis[k].j) - pot[v];
                q.push_back(w);
            }
        }
        std::size_t ei = 0, ej = 0;
        double best = -tol;
        bool found = false;
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                double d = C(i, j) - pot[i] - pot[n1 + j];
                if (d < best) {
                    best = d;
                    ei = i;
                    ej = j;
                    found = true;
                }
            }
        if (!found) break;

        // Tree path from column node ej to row node ei.
        std::fill(seen.begin(), seen.end(), 0);
        const std::size_t src = n1 + ej, dst = ei;
        q.assign(1, src);
        seen[src] = 1;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop_front();
            if (v == dst) break;
            for (std::size_t k : adj[v]) {
                std::size_t w = v < n1 ? n1 + basis[k].j : basis[k].i;
                if (seen[w]) continue;
                seen[w] = 1;
                parent_cell[w] = k;
                parent_node[w] = v;
                q.push_back(w);
            }
        }
        // Cells along the path from dst back to src; signs alternate starting
        // with '-' at the cell touching the entering column.
        std::vector<std::size_t> path;
        for (std::size_t v = dst; v != src; v = parent_node[v]) path.push_back(parent_cell[v]);
        // path[0] touches row ei, last touches column ej. From the column side:
        // cell at column ej is '-', then '+', ...
        std::size_t L = path.size();
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = basis.size();
        for (std::size_t k = 0; k < L; ++k) {
            bool minus = ((L - 1 - k) % 2 == 0);
            if (!minus) continue;
            double x = basis[path[k]].x;
            if (x < theta) {
                theta = x;
                leave = path[k];
            }
        }
        for (std::size_t k = 0; k < L; ++k) {
            bool minus = ((L - 1 - k) % 2 == 0);
            basis[path[k]].x += minus ? -theta : theta;
            if (basis[path[k]].x < 0) basis[path[k]].x = 0;
        }
        basis[leave] = {ei, ej, theta};
    }

    for (const auto& c : basis) {
        if (c.x <= 0) continue;
        plan.cost += c.x * C(c.i, c.j);
        plan.flows.push_back({rows[c.i], cols[c.j], c.x});
    }
    return plan;
}

} // namespace aisplan
