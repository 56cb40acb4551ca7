#include "aisplan/ais.hpp"

#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace aisplan {

std::string to_string(GroundMetricKind k) {
    switch (k) {
    case GroundMetricKind::Discrete: return "discrete";
    case GroundMetricKind::L1: return "l1";
    case GroundMetricKind::Euclidean: return "euclidean";
    case GroundMetricKind::Explicit: return "explicit";
    }
    return "?";
}

GroundMetricKind parse_ground_metric(const std::string& s) {
    if (s == "discrete") return GroundMetricKind::Discrete;
    if (s == "l1") return GroundMetricKind::L1;
    if (s == "euclidean") return GroundMetricKind::Euclidean;
    if (s == "explicit") return GroundMetricKind::Explicit;
    throw ModelError("unknown ground metric \"" + s + "\"");
}

double AisSpace::distance(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    switch (metric) {
    case GroundMetricKind::Discrete: return 1.0;
    case GroundMetricKind::Explicit: return explicit_dist[i * size + j];
    case GroundMetricKind::L1:
    case GroundMetricKind::Euclidean: {
        const auto& p = points.at(i);
        const auto& q = points.at(j);
        double s = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            double d = p[k] - q[k];
            s += metric == GroundMetricKind::L1 ? std::abs(d) : d * d;
        }
        return metric == GroundMetricKind::L1 ? s : std::sqrt(s);
    }
    }
    return 0.0;
}

MetricSpace AisSpace::restricted(std::span<const std::size_t> idx) const {
    const std::size_t n = idx.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = distance(idx[i], idx[j]);
    if (metric == GroundMetricKind::Discrete) return MetricSpace::discrete(n);
    std::vector<std::vector<double>> pts;
    if (metric == GroundMetricKind::L1 || metric == GroundMetricKind::Euclidean) {
        for (auto i : idx) pts.push_back(points.at(i));
        return MetricSpace::from_points(pts, metric == GroundMetricKind::L1 ? 1 : 2);
    }
    return MetricSpace(n, std::move(d));
}

EmbeddedPoints AisSpace::restricted_points(std::span<const std::size_t> idx) const {
    if (points.empty()) throw ModelError("AIS space has no embedded points");
    EmbeddedPoints e;
    for (auto i : idx) e.coords.push_back(points.at(i));
    return e;
}

double AisCertificate::max_eps() const {
    return eps.empty() ? 0.0 : *std::max_element(eps.begin(), eps.end());
}
double AisCertificate::max_delta() const {
    return delta.empty() ? 0.0 : *std::max_element(delta.begin(), delta.end());
}

const AisStage& AisGenerator::stage(std::size_t t) const {
    if (stationary) return stages.at(0);
    if (t == 0 || t > stages.size())
        throw ModelError("AIS generator has no stage " + std::to_string(t));
    return stages[t - 1];
}

bool AisGenerator::allows(std::size_t a) const {
    return action_set.empty() || std::find(action_set.begin(), action_set.end(), a) != action_set.end();
}

std::size_t AisGenerator::quantize_action(std::size_t a) const {
    return action_map.empty() ? a : action_map.at(a);
}

std::vector<std::size_t> AisGenerator::allowed_actions() const {
    if (!action_set.empty()) return action_set;
    std::vector<std::size_t> all(n_actions);
    for (std::size_t a = 0; a < n_actions; ++a) all[a] = a;
    return all;
}

std::vector<SparseDist> compose_kernel_from_obs_predictor(
    std::size_t nZ, std::size_t nA, std::size_t nY, const std::vector<std::size_t>& update,
    const std::vector<std::vector<double>>& obs_predictor) {
    if (update.size() != nZ * nA * nY || obs_predictor.size() != nZ * nA)
        throw ModelError("update map and obs predictor sizes do not match");
    std::vector<SparseDist> kernel(nZ * nA);
    for (std::size_t z = 0; z < nZ; ++z)
        for (std::size_t a = 0; a < nA; ++a) {
            const auto& nu = obs_predictor[z * nA + a];
            if (nu.size() != nY) throw ModelError("obs predictor row has wrong size");
            for (std::size_t y = 0; y < nY; ++y) {
                if (nu[y] <= 0) continue;
                std::size_t z2 = update[(z * nA + a) * nY + y];
                if (z2 == kNoNode) throw ModelError("update map undefined on a positive-probability observation");
                accumulate(kernel[z * nA + a], z2, nu[y]);
            }
        }
    return kernel;
}

void validate_generator(const AisGenerator& gen) {
    const std::size_t nA = gen.n_actions, nY = gen.n_observations;
    if (gen.stages.empty()) throw ModelError("AIS generator has no stages");
    if (gen.stationary && gen.stages.size() != 1)
        throw ModelError("stationary generator must have exactly one stage table");
    if (!gen.compress) throw ModelError("AIS generator has no compression");
    for (std::size_t k = 0; k < gen.stages.size(); ++k) {
        const AisStage& st = gen.stages[k];
        const std::string where = "stage " + std::to_string(k + 1);
        const std::size_t nZ = st.space.size;
        const bool last = !gen.stationary && k + 1 == gen.stages.size();
        const std::size_t next = gen.stationary ? nZ : (last ? 0 : gen.stages[k + 1].space.size);
        if (st.reward.size() != nZ * nA) throw ModelError(where + ": reward table has wrong size");
        if (!st.space.points.empty() && st.space.points.size() != nZ)
            throw ModelError(where + ": points do not match the space size");
        if (st.space.metric == GroundMetricKind::Explicit && st.space.explicit_dist.size() != nZ * nZ)
            throw ModelError(where + ": explicit metric has wrong size");
        if (last && st.kernel.empty()) continue;
        if (st.kernel.size() != nZ * nA) throw ModelError(where + ": kernel has wrong size");
        for (std::size_t r = 0; r < st.kernel.size(); ++r) {
            double s = 0;
            for (auto [z2, p] : st.kernel[r]) {
                if (z2 >= next) throw ModelError(where + ": kernel points outside the next space");
                if (p < -kClampTolerance) throw ModelError(where + ": negative kernel entry");
                s += p;
            }
            if (std::abs(s - 1.0) > kProbTolerance)
                throw ModelError(where + ": kernel row " + std::to_string(r) + " not stochastic");
        }
        if (!st.update.empty() && !st.obs_predictor.empty()) {
            auto composed = compose_kernel_from_obs_predictor(nZ, nA, nY, st.update, st.obs_predictor);
            for (std::size_t r = 0; r < composed.size(); ++r) {
                auto a = to_dense(composed[r], next), b = to_dense(st.kernel[r], next);
                if (tv_distance(a, b) > 1e-9)
                    throw ModelError(where + ": kernel differs from the update/obs-predictor composition");
            }
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

double sparse_distance(const AisSpace& space, IpmKind kind, double exponent, const SparseDist& mu,
                       const SparseDist& nu) {
    std::vector<std::size_t> idx;
    for (auto& e : mu) idx.push_back(e.first);
    for (auto& e : nu) idx.push_back(e.first);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<double> p(idx.size(), 0.0), q(idx.size(), 0.0);
    auto pos = [&](std::size_t z) {
        return static_cast<std::size_t>(std::lower_bound(idx.begin(), idx.end(), z) - idx.begin());
    };
    for (auto [z, w] : mu) p[pos(z)] += w;
    for (auto [z, w] : nu) q[pos(z)] += w;
    switch (kind) {
    case IpmKind::TotalVariation: return tv_distance(p, q);
    case IpmKind::Kantorovich: return kantorovich_distance(space.restricted(idx), p, q);
    case IpmKind::BoundedLipschitz: return bounded_lipschitz_distance(space.restricted(idx), p, q);
    case IpmKind::Mmd: return mmd_distance(space.restricted_points(idx), p, q, exponent);
    }
    return 0.0;
}

std::vector<std::vector<SparseDist>> compress_all(const HistoryTree& tree, const AisGenerator& gen) {
    std::vector<std::vector<SparseDist>> comp(tree.horizon());
    for (std::size_t t = 1; t <= tree.horizon(); ++t) {
        const auto& nodes = tree.stage(t);
        const std::size_t nZ = gen.stage(t).space.size;
        comp[t - 1].resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            SparseDist c = gen.compress(tree.history(t, i));
            double s = 0;
            for (auto [z, p] : c) {
                if (z >= nZ) throw ModelError("compression returned an index outside stage " + std::to_string(t));
                s += p;
            }
            if (std::abs(s - 1.0) > kProbTolerance) throw ModelError("compression returned a non-distribution");
            if (!gen.stochastic && c.size() != 1)
                throw ModelError("deterministic generator returned a non-degenerate compression");
            comp[t - 1][i] = std::move(c);
        }
    }
    return comp;
}

} // namespace

AisCertificate measure_ais(const HistoryTree& tree, const AisGenerator& gen, IpmKind kind,
                           double exponent) {
    const PomdpModel& m = tree.model();
    const std::size_t T = tree.horizon(), nA = m.n_actions, nY = m.n_observations;
    if (gen.n_actions != nA) throw ModelError("generator and model disagree on the action count");
    if (!gen.stationary && gen.stages.size() < T)
        throw ModelError("generator has fewer stages than the measurement horizon");
    auto comp = compress_all(tree, gen);
    AisCertificate cert;
    cert.kind = kind;
    cert.exponent = exponent;
    cert.eps.assign(T, 0.0);
    cert.delta.assign(T, 0.0);
    cert.measured = true;
    for (std::size_t t = 1; t <= T; ++t) {
        const AisStage& st = gen.stage(t);
        const auto& nodes = tree.stage(t);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            const SparseDist& c = comp[t - 1][i];
            for (std::size_t a = 0; a < nA; ++a) {
                const std::size_t ah = gen.quantize_action(a);
                double approx = 0;
                for (auto [z, p] : c) approx += p * st.reward[z * nA + ah];
                cert.eps[t - 1] =
                    std::max(cert.eps[t - 1], std::abs(expected_reward(m, node.belief, a) - approx));
                if (t == T) continue;
                SparseDist mu, nu;
                for (std::size_t y = 0; y < nY; ++y) {
                    double py = node.obs_prob[a * nY + y];
                    if (py <= 0) continue;
                    accumulate(mu, comp[t][node.child[a * nY + y]], py);
                }
                for (auto [z, p] : c) accumulate(nu, st.kernel[z * nA + ah], p);
                double d = sparse_distance(gen.stage(t + 1).space, kind, exponent, mu, nu);
                cert.delta[t - 1] = std::max(cert.delta[t - 1], d);
            }
        }
    }
    return cert;
}

AisCertificate measure_ais(const PomdpModel& model, const AisGenerator& gen, std::size_t horizon,
                           IpmKind kind, const MeasureOptions& opt) {
    HistoryTree tree(model, horizon, opt.history_cap, opt.node_cap);
    return measure_ais(tree, gen, kind, opt.mmd_exponent);
}

// ---------------------------------------------------------------------------

namespace {

InfoStateReport verify_impl(const HistoryTree& tree, const std::vector<std::vector<std::size_t>>& z,
                            const AisGenerator* gen) {
    const PomdpModel& m = tree.model();
    const std::size_t T = tree.horizon(), nA = m.n_actions, nY = m.n_observations;
    InfoStateReport rep;
    bool p2a = true, p2b = true;
    for (std::size_t t = 1; t <= T; ++t) {
        const auto& nodes = tree.stage(t);
        std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> range;
        std::map<std::pair<std::size_t, std::size_t>, SparseDist> rep_next;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            const std::size_t zi = z[t - 1][i];
            for (std::size_t a = 0; a < nA; ++a) {
                const double r = expected_reward(m, node.belief, a);
                auto key = std::make_pair(zi, a);
                auto it = range.find(key);
                if (it == range.end())
                    range.emplace(key, std::make_pair(r, r));
                else
                    it->second = {std::min(it->second.first, r), std::max(it->second.second, r)};
                if (gen) {
                    const AisStage& st = gen->stage(t);
                    if (!st.obs_predictor.empty() && zi < st.space.size) {
                        std::vector<double> psi(node.obs_prob.begin() + a * nY,
                                                node.obs_prob.begin() + (a + 1) * nY);
                        if (tv_distance(psi, st.obs_predictor[zi * nA + a]) > 1e-9) p2b = false;
                    }
                }
                if (t == T) continue;
                SparseDist mu;
                for (std::size_t y = 0; y < nY; ++y) {
                    double py = node.obs_prob[a * nY + y];
                    if (py <= 0) continue;
                    std::size_t child_z = z[t][node.child[a * nY + y]];
                    accumulate(mu, child_z, py);
                    if (gen) {
                        const AisStage& st = gen->stage(t);
                        if (!st.update.empty() && st.update[(zi * nA + a) * nY + y] != child_z) p2a = false;
                    }
                }
                auto rit = rep_next.find(key);
                if (rit == rep_next.end()) {
                    rep_next.emplace(key, std::move(mu));
                    continue;
                }
                std::size_t n = 0;
                for (auto& e : mu) n = std::max(n, e.first + 1);
                for (auto& e : rit->second) n = std::max(n, e.first + 1);
                rep.kernel_violation = std::max(
                    rep.kernel_violation, tv_distance(to_dense(mu, n), to_dense(rit->second, n)));
            }
        }
        for (auto& [key, r] : range)
            rep.reward_violation = std::max(rep.reward_violation, 0.5 * (r.second - r.first));
    }
    rep.holds = rep.reward_violation <= 1e-9 && rep.kernel_violation <= 1e-9;
    if (gen) {
        bool any_update = false, any_pred = false;
        for (auto& st : gen->stages) {
            any_update |= !st.update.empty();
            any_pred |= !st.obs_predictor.empty();
        }
        if (any_update) rep.p2a = p2a;
        if (any_pred) rep.p2b = p2b;
    }
    return rep;
}

std::vector<std::vector<std::size_t>> deterministic_indices(const HistoryTree& tree,
                                                            const CompressFn& compress) {
    std::vector<std::vector<std::size_t>> z(tree.horizon());
    for (std::size_t t = 1; t <= tree.horizon(); ++t) {
        const auto& nodes = tree.stage(t);
        z[t - 1].resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            SparseDist c = compress(tree.history(t, i));
            if (c.size() != 1) throw ModelError("verify_information_state needs a deterministic compression");
            z[t - 1][i] = c[0].first;
        }
    }
    return z;
}

} // namespace

InfoStateReport verify_information_state(const PomdpModel& model, const CompressFn& compress,
                                         std::size_t horizon, std::size_t history_cap) {
    HistoryTree tree(model, horizon, history_cap);
    return verify_impl(tree, deterministic_indices(tree, compress), nullptr);
}

InfoStateReport verify_information_state(const PomdpModel& model, const AisGenerator& gen,
                                         std::size_t horizon, std::size_t history_cap) {
    HistoryTree tree(model, horizon, history_cap);
    return verify_impl(tree, deterministic_indices(tree, gen.compress), &gen);
}

CompressFn history_index_compression(const PomdpModel& model, std::size_t horizon) {
    HistoryTree tree(model, horizon, std::max(horizon, kDefaultHistoryCap));
    auto index = std::make_shared<std::map<std::vector<std::size_t>, std::size_t>>();
    for (std::size_t t = 1; t <= horizon; ++t)
        for (std::size_t i = 0; i < tree.stage(t).size(); ++i) {
            std::vector<std::size_t> key;
            for (auto& s : tree.history(t, i).steps) {
                key.push_back(s.action);
                key.push_back(s.observation);
            }
            (*index)[key] = i;
        }
    return [index](const History& h) -> SparseDist {
        std::vector<std::size_t> key;
        for (auto& s : h.steps) {
            key.push_back(s.action);
            key.push_back(s.observation);
        }
        auto it = index->find(key);
        if (it == index->end()) throw ModelError("history not in the enumerated tree: " + to_string(h));
        return {{it->second, 1.0}};
    };
}

// ---------------------------------------------------------------------------

AisGenerator constant_generator(const PomdpModel& model, std::size_t horizon,
                                std::vector<double> reward_per_action) {
    if (reward_per_action.size() != model.n_actions) throw ModelError("reward vector has wrong size");
    AisGenerator g;
    g.n_actions = model.n_actions;
    g.n_observations = model.n_observations;
    g.discount = model.discount;
    g.stationary = horizon == 0;
    std::size_t k = g.stationary ? 1 : horizon;
    for (std::size_t t = 0; t < k; ++t) {
        AisStage st;
        st.space.size = 1;
        st.reward = reward_per_action;
        if (g.stationary || t + 1 < k) st.kernel.assign(model.n_actions, SparseDist{{0, 1.0}});
        g.stages.push_back(std::move(st));
    }
    g.compress = [](const History&) -> SparseDist { return {{0, 1.0}}; };
    g.descriptor.kind = "constant";
    return g;
}

AisGenerator with_observation_map(AisGenerator gen, std::vector<std::size_t> q_obs,
                                  std::size_t original_observations) {
    if (q_obs.size() != original_observations) throw ModelError("observation map has wrong size");
    auto inner = gen.compress;
    gen.compress = [inner, q = std::move(q_obs)](const History& h) {
        History mapped = h;
        for (auto& s : mapped.steps) s.observation = q.at(s.observation);
        return inner(mapped);
    };
    gen.descriptor.kind = "custom";
    return gen;
}

AisGenerator as_stochastic(AisGenerator gen) {
    gen.stochastic = true;
    return gen;
}

PomdpModel compress_observations(const PomdpModel& model, const std::vector<std::size_t>& q_obs) {
    if (q_obs.size() != model.n_observations) throw ModelError("observation map must be total");
    std::size_t nY = 0;
    for (auto y : q_obs) nY = std::max(nY, y + 1);
    PomdpModel out = make_empty_model(model.n_states, model.n_actions, nY, model.discount);
    out.transition = model.transition;
    out.reward = model.reward;
    out.initial_belief = model.initial_belief;
    out.state_labels = model.state_labels;
    out.action_labels = model.action_labels;
    for (std::size_t a = 0; a < model.n_actions; ++a)
        for (std::size_t s = 0; s < model.n_states; ++s)
            for (std::size_t y = 0; y < model.n_observations; ++y) out.O(a, s, q_obs[y]) += model.O(a, s, y);
    validate_model(out);
    return out;
}

} // namespace aisplan
