#include "aisplan/history_tree.hpp"

#include "aisplan/error.hpp"

#include <algorithm>

namespace aisplan {

HistoryTree::HistoryTree(const PomdpModel& m, std::size_t horizon, std::size_t history_cap,
                         std::size_t node_cap)
    : model_(&m) {
    if (horizon == 0) throw ModelError("horizon must be at least 1");
    if (horizon > history_cap)
        throw CapExceeded("horizon " + std::to_string(horizon) + " exceeds the history cap " +
                          std::to_string(history_cap));
    const std::size_t nA = m.n_actions, nY = m.n_observations;
    std::size_t total = 1;
    stages_.resize(horizon);
    stages_[0].push_back(Node{kNoNode, {0, 0}, m.initial_belief, {}, {}});
    for (std::size_t t = 0; t < horizon; ++t) {
        auto& cur = stages_[t];
        for (std::size_t i = 0; i < cur.size(); ++i) {
            Node& node = cur[i];
            node.obs_prob.assign(nA * nY, 0.0);
            for (std::size_t a = 0; a < nA; ++a) {
                auto psi = obs_likelihood(m, node.belief, a);
                std::copy(psi.begin(), psi.end(), node.obs_prob.begin() + a * nY);
            }
            if (t + 1 == horizon) continue;
            node.child.assign(nA * nY, kNoNode);
            for (std::size_t a = 0; a < nA; ++a)
                for (std::size_t y = 0; y < nY; ++y) {
                    if (node.obs_prob[a * nY + y] <= 0.0) continue;
                    if (++total > node_cap)
                        throw CapExceeded("history enumeration exceeds " + std::to_string(node_cap) +
                                          " nodes");
                    node.child[a * nY + y] = stages_[t + 1].size();
                    stages_[t + 1].push_back(
                        Node{i, {a, y}, belief_update(m, node.belief, a, y), {}, {}});
                }
        }
    }
}

History HistoryTree::history(std::size_t t, std::size_t idx) const {
    History h;
    h.steps.resize(t - 1);
    for (std::size_t s = t; s > 1; --s) {
        const Node& n = stages_[s - 1][idx];
        h.steps[s - 2] = n.last;
        idx = n.parent;
    }
    return h;
}

std::size_t HistoryTree::node_count() const {
    std::size_t n = 0;
    for (auto& s : stages_) n += s.size();
    return n;
}

} // namespace aisplan
