#pragma once

#include <vector>

namespace aisplan {

struct LpResult {
    double value = 0;
    std::vector<double> x;
};

/// Maximizes c'x subject to A x <= b, x >= 0, for b >= 0 (the origin is feasible).
/// Dense tableau simplex with Bland's rule. A is row-major, rows x c.size().
/// Throws NumericalError if the problem is unbounded.
LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b);

} // namespace aisplan
