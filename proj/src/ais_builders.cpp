#include "aisplan/ais.hpp"

#include "aisplan/error.hpp"

#include <cmath>
#include <deque>
#include <memory>
#include <unordered_map>

namespace aisplan {

namespace {

using Key = std::vector<long long>;

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = 1469598103934665603ull;
        for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

/// Belief points deduplicated at 1e-12 resolution.
struct PointSet {
    std::vector<std::vector<double>> pts;
    std::unordered_map<Key, std::size_t, KeyHash> index;

    static Key key(const std::vector<double>& p) {
        Key k(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) k[i] = std::llround(p[i] * 1e12);
        return k;
    }
    std::pair<std::size_t, bool> insert(const std::vector<double>& p) {
        auto [it, ok] = index.emplace(key(p), pts.size());
        if (ok) pts.push_back(p);
        return {it->second, ok};
    }
    std::size_t find(const std::vector<double>& p) const {
        auto it = index.find(key(p));
        if (it != index.end()) return it->second;
        // Rounding boundary: fall back to a tolerance search.
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d = 0;
            for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(pts[i][k] - p[k]);
            if (d <= 1e-9) return i;
        }
        return kNoNode;
    }
    std::size_t size() const { return pts.size(); }
};

struct BeliefCompressState {
    PomdpModel model;
    std::size_t n;
    bool stationary;
    std::vector<PointSet> sets;
};

std::vector<double> project(const std::vector<double>& b, std::size_t n) {
    if (n == 0) return b;
    return lattice_quantize(ProbVector(b), n).values();
}

/// Fills reward, obs_predictor, update and kernel of a stage; images go to `next`.
AisStage make_stage(const PomdpModel& m, const PointSet& cur, PointSet* next, std::size_t n,
                    bool quantize_images, std::size_t& total, std::size_t cap) {
    const std::size_t nA = m.n_actions, nY = m.n_observations, nZ = cur.size();
    AisStage st;
    st.space.size = nZ;
    st.space.points = cur.pts;
    st.space.metric = GroundMetricKind::L1;
    st.reward.resize(nZ * nA);
    for (std::size_t z = 0; z < nZ; ++z) {
        ProbVector b(cur.pts[z]);
        for (std::size_t a = 0; a < nA; ++a) st.reward[z * nA + a] = expected_reward(m, b, a);
    }
    if (!next) return st;
    st.obs_predictor.resize(nZ * nA);
    st.update.assign(nZ * nA * nY, kNoNode);
    for (std::size_t z = 0; z < nZ; ++z) {
        ProbVector b(cur.pts[z]);
        for (std::size_t a = 0; a < nA; ++a) {
            auto psi = obs_likelihood(m, b, a);
            st.obs_predictor[z * nA + a] = psi.values();
            for (std::size_t y = 0; y < nY; ++y) {
                if (psi[y] <= 0) continue;
                auto img = belief_update(m, b, a, y).values();
                if (quantize_images) img = project(img, n);
                auto [idx, fresh] = next->insert(img);
                if (fresh && ++total > cap)
                    throw CapExceeded("belief AIS space exceeds " + std::to_string(cap) +
                                      " points; use a smaller n");
                st.update[(z * nA + a) * nY + y] = idx;
            }
        }
    }
    return st;
}

void add_images(const PomdpModel& m, const PointSet& from, PointSet& to, std::size_t& total,
                std::size_t cap) {
    for (const auto& p : from.pts) {
        ProbVector b(p);
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            auto psi = obs_likelihood(m, b, a);
            for (std::size_t y = 0; y < m.n_observations; ++y) {
                if (psi[y] <= 0) continue;
                if (to.insert(belief_update(m, b, a, y).values()).second && ++total > cap)
                    throw CapExceeded("reachable belief set exceeds " + std::to_string(cap) + " points");
            }
        }
    }
}

CompressFn make_compress(std::shared_ptr<const BeliefCompressState> state) {
    return [state](const History& h) -> SparseDist {
        const std::size_t t = h.stage();
        const PointSet& set = state->stationary ? state->sets.at(0) : state->sets.at(t - 1);
        auto b = belief_of(state->model, h).values();
        std::size_t idx = set.find(project(b, state->n));
        if (idx == kNoNode)
            throw ModelError("history " + to_string(h) + " compresses outside the AIS space");
        return {{idx, 1.0}};
    };
}

} // namespace

CompressFn belief_point_compression(const PomdpModel& model, std::size_t n, bool stationary,
                                    const std::vector<std::vector<std::vector<double>>>& stage_points) {
    auto state = std::make_shared<BeliefCompressState>();
    state->model = model;
    state->n = n;
    state->stationary = stationary;
    for (auto& pts : stage_points) {
        PointSet set;
        for (auto& p : pts) set.insert(p);
        state->sets.push_back(std::move(set));
    }
    return make_compress(state);
}

AisGenerator build_belief_quant_ais(const PomdpModel& m, std::size_t horizon, std::size_t n,
                                    IpmKind kind, const BeliefQuantOptions& opt) {
    validate_model(m);
    const bool stationary = horizon == 0;
    const bool quantize_images = n > 0 && (stationary || opt.kernel == BeliefKernel::QuantizedUpdate);
    std::vector<ProbVector> seeds = opt.seeds.empty() ? std::vector<ProbVector>{m.initial_belief} : opt.seeds;
    auto state = std::make_shared<BeliefCompressState>();
    state->model = m;
    state->n = n;
    state->stationary = stationary;

    AisGenerator g;
    g.n_actions = m.n_actions;
    g.n_observations = m.n_observations;
    g.discount = m.discount;
    g.stationary = stationary;
    std::size_t total = 0;

    if (!stationary) {
        auto& Z = state->sets;
        Z.resize(horizon);
        std::vector<PointSet> E(n > 0 ? horizon : 0);
        for (auto& b : seeds) {
            Z[0].insert(project(b.values(), n));
            if (n > 0) E[0].insert(b.values());
        }
        total = Z[0].size();
        for (std::size_t t = 0; t < horizon; ++t) {
            const bool last = t + 1 == horizon;
            if (!last && n > 0) {
                std::size_t etotal = 0;
                add_images(m, E[t], E[t + 1], etotal, opt.point_cap);
                for (auto& p : E[t + 1].pts)
                    if (Z[t + 1].insert(project(p, n)).second && ++total > opt.point_cap)
                        throw CapExceeded("belief AIS space exceeds " + std::to_string(opt.point_cap) +
                                          " points; use a smaller n");
            }
            g.stages.push_back(make_stage(m, Z[t], last ? nullptr : &Z[t + 1], n, quantize_images,
                                          total, opt.point_cap));
        }
    } else {
        auto& sets = state->sets;
        sets.resize(1);
        PointSet& Z = sets[0];
        const std::size_t dim = m.n_states;
        if (n > 0 && lattice_size(dim, n) <= opt.full_lattice_limit) {
            for (auto& p : enumerate_lattice(dim, n)) Z.insert(p);
        } else {
            PointSet level;
            for (auto& b : seeds) level.insert(b.values());
            for (std::size_t d = 0;; ++d) {
                for (auto& p : level.pts) Z.insert(project(p, n));
                if (d + 1 >= opt.seed_depth || n == 0) break;
                PointSet nxt;
                std::size_t etotal = 0;
                add_images(m, level, nxt, etotal, opt.point_cap);
                level = std::move(nxt);
            }
        }
        if (Z.size() > opt.point_cap) throw CapExceeded("belief AIS space exceeds the point cap; use a smaller n");
        total = Z.size();
        // Closure under the (quantized) update: rebuild until no new image appears.
        AisStage st;
        for (;;) {
            PointSet cur = Z;
            st = make_stage(m, cur, &Z, n, quantize_images, total, opt.point_cap);
            if (Z.size() == cur.size()) break;
        }
        g.stages.push_back(std::move(st));
    }

    g.compress = make_compress(state);
    for (auto& st : g.stages)
        if (!st.update.empty())
            st.kernel = compose_kernel_from_obs_predictor(st.space.size, g.n_actions, g.n_observations,
                                                          st.update, st.obs_predictor);
    g.descriptor.kind = n == 0 ? "exact_belief" : "belief_quantization";
    g.descriptor.n = n;
    g.descriptor.kernel = quantize_images ? "quantized" : "exact";

    const std::size_t k = stationary ? 1 : horizon;
    AisCertificate decl;
    decl.kind = kind;
    decl.measured = false;
    if (n == 0) {
        decl.eps.assign(k, 0.0);
        decl.delta.assign(k, 0.0);
        g.declared = decl;
    } else if (kind == IpmKind::BoundedLipschitz) {
        const double e1 = lattice_l1_error_bound(m.n_states, n);
        decl.eps.assign(k, m.reward_sup_norm() * e1);
        decl.delta.assign(k, (quantize_images ? 4.0 : 3.0) * e1);
        if (!stationary) decl.delta.back() = 0.0;
        g.declared = decl;
    }
    return g;
}

} // namespace aisplan
