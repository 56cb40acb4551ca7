#pragma once

#include "aisplan/model.hpp"

#include <limits>
#include <vector>

namespace aisplan {

inline constexpr std::size_t kDefaultNodeCap = 2'000'000;
inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

/// All reachable histories h_1..h_T of a model, with exact beliefs.
/// A branch (a, y) exists iff psi(y | b, a) > 0.
class HistoryTree {
public:
    struct Node {
        std::size_t parent = kNoNode;
        Step last{0, 0};
        ProbVector belief;
        std::vector<double> obs_prob;   // [a * nY + y]
        std::vector<std::size_t> child; // [a * nY + y], only below the last stage
    };

    HistoryTree(const PomdpModel& m, std::size_t horizon,
                std::size_t history_cap = kDefaultHistoryCap,
                std::size_t node_cap = kDefaultNodeCap);

    std::size_t horizon() const { return stages_.size(); }
    /// Nodes at stage t (1-based).
    const std::vector<Node>& stage(std::size_t t) const { return stages_.at(t - 1); }
    History history(std::size_t t, std::size_t idx) const;
    std::size_t node_count() const;
    const PomdpModel& model() const { return *model_; }

private:
    const PomdpModel* model_;
    std::vector<std::vector<Node>> stages_;
};

} // namespace aisplan
