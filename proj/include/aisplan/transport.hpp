#pragma once

#include <cstddef>
#include <vector>

namespace aisplan {

struct TransportPlan {
    double cost = 0;
    /// (row, column, mass) for positive flows.
    struct Flow {
        std::size_t from, to;
        double mass;
    };
    std::vector<Flow> flows;
};

/// Exact balanced transportation problem min sum C_ij x_ij, solved by the
/// transportation simplex (network simplex on the bipartite graph).
/// supply and demand must have equal totals within 1e-9; cost is row-major.
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::vector<double>& cost);

} // namespace aisplan
