#include "aisplan/planning.hpp"

#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>

namespace aisplan {

const StageTable& ValueTables::stage(std::size_t t) const {
    if (stationary) return stages.at(0);
    if (t == 0 || t > stages.size()) throw ModelError("value tables have no stage " + std::to_string(t));
    return stages[t - 1];
}

const std::vector<double>& AisPolicy::stage(std::size_t t) const {
    if (stages.size() == 1) return stages[0];
    if (t == 0 || t > stages.size()) throw ModelError("policy has no stage " + std::to_string(t));
    return stages[t - 1];
}

std::vector<std::size_t> argmax_set(const StageTable& st, std::size_t x, std::size_t nA, double tol,
                                    const std::vector<std::size_t>& allowed) {
    std::vector<std::size_t> acts = allowed;
    if (acts.empty())
        for (std::size_t a = 0; a < nA; ++a) acts.push_back(a);
    double best = -INFINITY;
    for (auto a : acts) best = std::max(best, st.q[x * nA + a]);
    std::vector<std::size_t> out;
    for (auto a : acts)
        if (st.q[x * nA + a] >= best - tol) out.push_back(a);
    return out;
}

namespace {

void check_policy_row(const ProbVector& p, std::size_t nA) {
    if (p.size() != nA) throw ModelError("policy returned a distribution of the wrong size");
}

std::size_t pick_greedy(const double* q, const std::vector<std::size_t>& acts) {
    std::size_t best = acts.front();
    for (auto a : acts)
        if (q[a] > q[best]) best = a;
    return best;
}

/// Shared backward pass over a history tree. `policy` null means optimize.
ValueTables history_backward(const HistoryTree& tree, const HistoryPolicy* policy) {
    const PomdpModel& m = tree.model();
    const std::size_t T = tree.horizon(), nA = m.n_actions, nY = m.n_observations;
    const double g = m.discount;
    ValueTables vt;
    vt.n_actions = nA;
    vt.discount = g;
    vt.stages.resize(T);
    std::vector<std::size_t> all(nA);
    for (std::size_t a = 0; a < nA; ++a) all[a] = a;
    for (std::size_t t = T; t >= 1; --t) {
        const auto& nodes = tree.stage(t);
        StageTable& st = vt.stages[t - 1];
        st.value.assign(nodes.size(), 0.0);
        st.q.assign(nodes.size() * nA, 0.0);
        st.greedy.assign(nodes.size(), 0);
        st.keys.resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            History h = tree.history(t, i);
            st.keys[i] = to_string(h);
            for (std::size_t a = 0; a < nA; ++a) {
                double q = expected_reward(m, node.belief, a);
                if (t < T) {
                    const auto& next = vt.stages[t].value;
                    for (std::size_t y = 0; y < nY; ++y) {
                        double p = node.obs_prob[a * nY + y];
                        if (p > 0) q += g * p * next[node.child[a * nY + y]];
                    }
                }
                st.q[i * nA + a] = q;
            }
            st.greedy[i] = pick_greedy(&st.q[i * nA], all);
            if (policy) {
                ProbVector pi = (*policy)(h);
                check_policy_row(pi, nA);
                double v = 0;
                for (std::size_t a = 0; a < nA; ++a) v += pi[a] * st.q[i * nA + a];
                st.value[i] = v;
            } else {
                st.value[i] = st.q[i * nA + st.greedy[i]];
            }
        }
        if (t == 1) break;
    }
    return vt;
}

} // namespace

ValueTables history_policy_eval(const HistoryTree& tree, const HistoryPolicy& policy) {
    return history_backward(tree, &policy);
}

ValueTables history_policy_eval(const PomdpModel& model, const HistoryPolicy& policy, std::size_t horizon,
                                std::size_t cap) {
    HistoryTree tree(model, horizon, cap);
    return history_backward(tree, &policy);
}

ValueTables history_dp(const HistoryTree& tree) { return history_backward(tree, nullptr); }

ValueTables history_dp(const PomdpModel& model, std::size_t horizon, std::size_t cap) {
    HistoryTree tree(model, horizon, cap);
    return history_backward(tree, nullptr);
}

// ---------------------------------------------------------------------------

namespace {

ValueTables ais_backward(const AisGenerator& gen, std::size_t T, const AisPolicy* policy) {
    if (T == 0) throw ModelError("AIS dynamic program needs a positive horizon");
    if (!gen.stationary && gen.stages.size() < T)
        throw ModelError("generator has " + std::to_string(gen.stages.size()) + " stages, horizon is " +
                         std::to_string(T));
    const std::size_t nA = gen.n_actions;
    const double g = gen.discount;
    const auto acts = gen.allowed_actions();
    ValueTables vt;
    vt.n_actions = nA;
    vt.discount = g;
    vt.stages.resize(T);
    for (std::size_t t = T; t >= 1; --t) {
        const AisStage& as = gen.stage(t);
        const std::size_t nZ = as.space.size;
        StageTable& st = vt.stages[t - 1];
        st.value.assign(nZ, 0.0);
        st.q.assign(nZ * nA, 0.0);
        st.greedy.assign(nZ, 0);
        st.keys.resize(nZ);
        const std::vector<double>* next = t < T ? &vt.stages[t].value : nullptr;
        if (next && as.kernel.size() != nZ * nA)
            throw ModelError("generator stage " + std::to_string(t) + " has no kernel");
        for (std::size_t z = 0; z < nZ; ++z) {
            st.keys[z] = "z" + std::to_string(z);
            for (std::size_t a = 0; a < nA; ++a) {
                const std::size_t ah = gen.quantize_action(a);
                double q = as.reward[z * nA + ah];
                if (next)
                    for (auto [z2, p] : as.kernel[z * nA + ah]) q += g * p * (*next)[z2];
                st.q[z * nA + a] = q;
            }
            st.greedy[z] = pick_greedy(&st.q[z * nA], acts);
            if (policy) {
                const auto& row = policy->stage(t);
                if (row.size() != nZ * nA) throw ModelError("policy table does not match the AIS space");
                double v = 0, s = 0;
                for (std::size_t a = 0; a < nA; ++a) {
                    v += row[z * nA + a] * st.q[z * nA + a];
                    s += row[z * nA + a];
                }
                if (std::abs(s - 1.0) > kProbTolerance) throw ModelError("policy row is not a distribution");
                st.value[z] = v;
            } else {
                st.value[z] = st.q[z * nA + st.greedy[z]];
            }
        }
        if (t == 1) break;
    }
    return vt;
}

} // namespace

ValueTables ais_dp(const AisGenerator& gen, std::size_t horizon) { return ais_backward(gen, horizon, nullptr); }

ValueTables ais_policy_eval(const AisGenerator& gen, const AisPolicy& policy, std::size_t horizon) {
    return ais_backward(gen, horizon, &policy);
}

AisPolicy greedy_policy(const ValueTables& tables) {
    AisPolicy p;
    p.n_actions = tables.n_actions;
    for (const auto& st : tables.stages) {
        std::vector<double> row(st.greedy.size() * tables.n_actions, 0.0);
        for (std::size_t z = 0; z < st.greedy.size(); ++z) row[z * tables.n_actions + st.greedy[z]] = 1.0;
        p.stages.push_back(std::move(row));
    }
    return p;
}

AisPolicy random_ais_policy(const AisGenerator& gen, std::size_t horizon, std::mt19937_64& rng) {
    const std::size_t nA = gen.n_actions;
    const auto acts = gen.allowed_actions();
    AisPolicy p;
    p.n_actions = nA;
    const std::size_t k = gen.stationary ? 1 : horizon;
    for (std::size_t t = 1; t <= k; ++t) {
        const std::size_t nZ = gen.stage(t).space.size;
        std::vector<double> row(nZ * nA, 0.0);
        for (std::size_t z = 0; z < nZ; ++z) {
            double s = 0;
            for (auto a : acts) s += row[z * nA + a] = -std::log(1.0 - uniform01(rng));
            for (auto a : acts) row[z * nA + a] /= s;
        }
        p.stages.push_back(std::move(row));
    }
    return p;
}

HistoryPolicy lift_policy(const AisGenerator& gen, const AisPolicy& policy) {
    return [gen, policy](const History& h) {
        const std::size_t nA = policy.n_actions;
        const auto& row = policy.stage(h.stage());
        std::vector<double> pi(nA, 0.0);
        for (auto [z, w] : gen.compress(h))
            for (std::size_t a = 0; a < nA; ++a) pi[a] += w * row[z * nA + a];
        double s = 0;
        for (double v : pi) s += v;
        for (double& v : pi) v /= s;
        return ProbVector(std::move(pi));
    };
}

ValueGap value_gap(const HistoryTree& tree, const ValueTables& hv, const AisGenerator& gen,
                   const ValueTables& av) {
    const std::size_t T = tree.horizon(), nA = gen.n_actions;
    ValueGap gap;
    gap.value.assign(T, 0.0);
    gap.q.assign(T, 0.0);
    for (std::size_t t = 1; t <= T; ++t) {
        const auto& hs = hv.stage(t);
        const auto& as = av.stage(t);
        for (std::size_t i = 0; i < tree.stage(t).size(); ++i) {
            SparseDist c = gen.compress(tree.history(t, i));
            double v = 0;
            std::vector<double> q(nA, 0.0);
            for (auto [z, w] : c) {
                v += w * as.value[z];
                for (std::size_t a = 0; a < nA; ++a) q[a] += w * as.q[z * nA + a];
            }
            gap.value[t - 1] = std::max(gap.value[t - 1], std::abs(hs.value[i] - v));
            for (std::size_t a = 0; a < nA; ++a)
                gap.q[t - 1] = std::max(gap.q[t - 1], std::abs(hs.q[i * nA + a] - q[a]));
        }
    }
    return gap;
}

std::vector<double> history_gap(const ValueTables& a, const ValueTables& b) {
    if (a.stages.size() != b.stages.size()) throw ModelError("value tables have different horizons");
    std::vector<double> out(a.stages.size(), 0.0);
    for (std::size_t t = 0; t < out.size(); ++t) {
        const auto& x = a.stages[t].value;
        const auto& y = b.stages[t].value;
        if (x.size() != y.size()) throw ModelError("value tables index different histories");
        for (std::size_t i = 0; i < x.size(); ++i) out[t] = std::max(out[t], std::abs(x[i] - y[i]));
    }
    return out;
}

} // namespace aisplan
