#include "aisplan/ais.hpp"

#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>

namespace aisplan {

namespace {

void require_mdp(const PomdpModel& m) {
    validate_model(m);
    if (!is_fully_observed(m)) throw ModelError("model is not fully observed");
}

SparseDist initial_compression(const ProbVector& init, const std::vector<std::size_t>* q) {
    SparseDist d;
    for (std::size_t s = 0; s < init.size(); ++s)
        if (init[s] > 0) accumulate(d, q ? (*q)[s] : s, init[s]);
    return d;
}

bool is_point_mass(const ProbVector& p) {
    return std::count_if(p.begin(), p.end(), [](double x) { return x > 0; }) == 1;
}

} // namespace

AisGenerator mdp_generator(const PomdpModel& mdp) {
    require_mdp(mdp);
    const std::size_t nS = mdp.n_states, nA = mdp.n_actions;
    AisGenerator g;
    g.n_actions = nA;
    g.n_observations = nS;
    g.discount = mdp.discount;
    g.stationary = true;
    AisStage st;
    st.space.size = nS;
    st.reward = mdp.reward;
    st.obs_predictor.resize(nS * nA);
    st.update.assign(nS * nA * nS, kNoNode);
    for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t a = 0; a < nA; ++a) {
            std::vector<double> row(nS);
            for (std::size_t s2 = 0; s2 < nS; ++s2) {
                row[s2] = mdp.T(a, s, s2);
                st.update[(s * nA + a) * nS + s2] = s2;
            }
            st.obs_predictor[s * nA + a] = row;
        }
    st.kernel = compose_kernel_from_obs_predictor(nS, nA, nS, st.update, st.obs_predictor);
    g.stages.push_back(std::move(st));
    g.stochastic = !is_point_mass(mdp.initial_belief);
    SparseDist init = initial_compression(mdp.initial_belief, nullptr);
    g.compress = [init](const History& h) -> SparseDist {
        if (h.steps.empty()) return init;
        return {{h.steps.back().observation, 1.0}};
    };
    g.descriptor.kind = "mdp_state";
    AisCertificate zero;
    zero.eps = {0.0};
    zero.delta = {0.0};
    zero.measured = false;
    g.declared = zero;
    return g;
}

std::size_t AggregationSpec::cells() const {
    std::size_t k = 0;
    for (auto c : q) k = std::max(k, c + 1);
    return k;
}

AggregationResult build_aggregated_mdp(const PomdpModel& mdp, const AggregationSpec& spec) {
    require_mdp(mdp);
    const std::size_t nS = mdp.n_states, nA = mdp.n_actions;
    if (spec.q.size() != nS || spec.w.size() != nS) throw ModelError("aggregation spec has wrong size");
    const std::size_t K = spec.cells();
    std::vector<double> wsum(K, 0.0);
    for (std::size_t s = 0; s < nS; ++s) {
        if (spec.w[s] < 0) throw ModelError("aggregation weights must be nonnegative");
        wsum[spec.q[s]] += spec.w[s];
    }
    for (std::size_t c = 0; c < K; ++c)
        if (std::abs(wsum[c] - 1.0) > 1e-9)
            throw ModelError("aggregation weights of cell " + std::to_string(c) + " do not sum to 1");

    // Cell masses P(cell'|s,a).
    std::vector<double> cellP(nS * nA * K, 0.0);
    for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t a = 0; a < nA; ++a)
            for (std::size_t s2 = 0; s2 < nS; ++s2) cellP[(s * nA + a) * K + spec.q[s2]] += mdp.T(a, s, s2);

    std::vector<double> T(nA * K * K, 0.0), R(K * nA, 0.0);
    for (std::size_t s = 0; s < nS; ++s) {
        const std::size_t c = spec.q[s];
        for (std::size_t a = 0; a < nA; ++a) {
            R[c * nA + a] += spec.w[s] * mdp.R(s, a);
            for (std::size_t c2 = 0; c2 < K; ++c2)
                T[(a * K + c) * K + c2] += spec.w[s] * cellP[(s * nA + a) * K + c2];
        }
    }

    double eps = 0;
    for (std::size_t s1 = 0; s1 < nS; ++s1)
        for (std::size_t s2 = s1 + 1; s2 < nS; ++s2) {
            if (spec.q[s1] != spec.q[s2]) continue;
            for (std::size_t a = 0; a < nA; ++a) {
                eps = std::max(eps, std::abs(mdp.R(s1, a) - mdp.R(s2, a)));
                for (std::size_t c2 = 0; c2 < K; ++c2)
                    eps = std::max(eps, std::abs(cellP[(s1 * nA + a) * K + c2] - cellP[(s2 * nA + a) * K + c2]));
            }
        }

    std::vector<double> init(K, 0.0);
    for (std::size_t s = 0; s < nS; ++s) init[spec.q[s]] += mdp.initial_belief[s];

    AggregationResult res;
    res.model = make_mdp(K, nA, T, R, mdp.discount, ProbVector(init));
    res.similarity_eps = eps;
    res.declared.kind = IpmKind::TotalVariation;
    res.declared.eps = {eps};
    res.declared.delta = {eps * static_cast<double>(K)};
    res.declared.measured = false;

    double em = 0, dm = 0;
    for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t a = 0; a < nA; ++a) {
            const std::size_t c = spec.q[s];
            em = std::max(em, std::abs(mdp.R(s, a) - R[c * nA + a]));
            double tv = 0;
            for (std::size_t c2 = 0; c2 < K; ++c2)
                tv += std::abs(cellP[(s * nA + a) * K + c2] - T[(a * K + c) * K + c2]);
            dm = std::max(dm, tv);
        }
    res.measured.kind = IpmKind::TotalVariation;
    res.measured.eps = {em};
    res.measured.delta = {dm};
    res.measured.measured = true;

    AisGenerator g;
    g.n_actions = nA;
    g.n_observations = nS;
    g.discount = mdp.discount;
    g.stationary = true;
    AisStage st;
    st.space.size = K;
    st.reward = R;
    st.kernel.resize(K * nA);
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t a = 0; a < nA; ++a) {
            std::vector<double> row(T.begin() + (a * K + c) * K, T.begin() + (a * K + c + 1) * K);
            st.kernel[c * nA + a] = to_sparse(row);
        }
    g.stages.push_back(std::move(st));
    g.stochastic = !is_point_mass(mdp.initial_belief);
    auto q = spec.q;
    SparseDist init_c = initial_compression(mdp.initial_belief, &q);
    g.compress = [q, init_c](const History& h) -> SparseDist {
        if (h.steps.empty()) return init_c;
        return {{q.at(h.steps.back().observation), 1.0}};
    };
    g.descriptor.kind = "custom";
    g.declared = res.declared;
    res.generator = std::move(g);
    return res;
}

LatentCertificate certify_latent_space(const PomdpModel& mdp, const LatentModel& lat, double L_r, double L_p) {
    require_mdp(mdp);
    const std::size_t nS = mdp.n_states, nA = mdp.n_actions, K = lat.points.size();
    if (lat.phi.size() != nS) throw ModelError("embedding must map every state");
    if (lat.kernel.size() != K * nA || lat.reward.size() != K * nA)
        throw ModelError("latent model tables have wrong size");
    for (auto z : lat.phi)
        if (z >= K) throw ModelError("embedding points outside the latent space");
    const MetricSpace metric = MetricSpace::from_points(lat.points, 2);
    LatentCertificate out;
    out.certificate.kind = IpmKind::Kantorovich;
    double eps = 0, delta = 0;
    for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t a = 0; a < nA; ++a) {
            const std::size_t z = lat.phi[s];
            eps = std::max(eps, std::abs(mdp.R(s, a) - lat.reward[z * nA + a]));
            std::vector<double> push(K, 0.0);
            for (std::size_t s2 = 0; s2 < nS; ++s2) push[lat.phi[s2]] += mdp.T(a, s, s2);
            delta = std::max(delta, kantorovich_distance(metric, push, lat.kernel[z * nA + a]));
        }
    out.certificate.eps = {eps};
    out.certificate.delta = {delta};
    if (mdp.discount * L_p < 1.0) out.lipschitz_value_bound = L_r / (1.0 - mdp.discount * L_p);
    return out;
}

std::pair<double, double> latent_lipschitz_constants(const LatentModel& lat, std::size_t nA) {
    const std::size_t K = lat.points.size();
    const MetricSpace metric = MetricSpace::from_points(lat.points, 2);
    double Lr = 0, Lp = 0;
    for (std::size_t z1 = 0; z1 < K; ++z1)
        for (std::size_t z2 = z1 + 1; z2 < K; ++z2) {
            double d = metric(z1, z2);
            if (d == 0) continue;
            for (std::size_t a = 0; a < nA; ++a) {
                Lr = std::max(Lr, std::abs(lat.reward[z1 * nA + a] - lat.reward[z2 * nA + a]) / d);
                Lp = std::max(Lp, kantorovich_distance(metric, lat.kernel[z1 * nA + a], lat.kernel[z2 * nA + a]) / d);
            }
        }
    return {Lr, Lp};
}

namespace {

void check_quantizer(std::size_t nA, const std::vector<std::size_t>& subset, const std::vector<std::size_t>& q) {
    if (q.size() != nA) throw ModelError("action quantizer must map every action");
    if (subset.empty()) throw ModelError("action subset is empty");
    for (auto a : subset)
        if (a >= nA) throw ModelError("action subset has an out-of-range action");
    for (std::size_t a = 0; a < nA; ++a)
        if (std::find(subset.begin(), subset.end(), q[a]) == subset.end())
            throw ModelError("action quantizer maps outside the subset");
    for (auto a : subset)
        if (q[a] != a) throw ModelError("action quantizer is not idempotent on the subset");
}

} // namespace

AisCertificate certify_action_quantizer(const PomdpModel& mdp, const std::vector<std::size_t>& subset,
                                        const std::vector<std::size_t>& q_a, IpmKind kind,
                                        const std::optional<MetricSpace>& metric) {
    require_mdp(mdp);
    check_quantizer(mdp.n_actions, subset, q_a);
    const std::size_t nS = mdp.n_states;
    FunctionClassSpec fc;
    fc.kind = kind;
    if (kind == IpmKind::Kantorovich || kind == IpmKind::BoundedLipschitz)
        fc.metric = metric ? *metric : MetricSpace::discrete(nS);
    if (kind == IpmKind::Mmd) throw Unsupported("MMD action-quantizer certificates are not supported");
    double eps = 0, delta = 0;
    for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            const std::size_t b = q_a[a];
            eps = std::max(eps, std::abs(mdp.R(s, a) - mdp.R(s, b)));
            std::vector<double> p(nS), q(nS);
            for (std::size_t s2 = 0; s2 < nS; ++s2) {
                p[s2] = mdp.T(a, s, s2);
                q[s2] = mdp.T(b, s, s2);
            }
            delta = std::max(delta, ipm_distance(fc, p, q));
        }
    AisCertificate c;
    c.kind = kind;
    c.eps = {eps};
    c.delta = {delta};
    return c;
}

AisGenerator action_quantized_generator(const PomdpModel& mdp, const std::vector<std::size_t>& subset,
                                        const std::vector<std::size_t>& q_a) {
    check_quantizer(mdp.n_actions, subset, q_a);
    AisGenerator g = mdp_generator(mdp);
    g.action_set = subset;
    std::sort(g.action_set.begin(), g.action_set.end());
    g.action_map = q_a;
    g.declared.reset();
    return g;
}

} // namespace aisplan
