#include "aisplan/error.hpp"
#include "aisplan/planning.hpp"

#include <algorithm>
#include <cmath>

namespace aisplan {

std::string to_string(BoundVariant v) { return v == BoundVariant::Primary ? "primary" : "alt"; }

BoundVariant parse_bound_variant(const std::string& s) {
    if (s == "primary") return BoundVariant::Primary;
    if (s == "alt" || s == "alternative") return BoundVariant::Alternative;
    throw ModelError("unknown bound variant \"" + s + "\" (allowed: primary, alt)");
}

double minkowski_of_values(const AisSpace& space, const std::vector<double>& f, IpmKind kind) {
    if (f.size() != space.size) throw ModelError("value table does not match the AIS space");
    if (f.empty()) return 0.0;
    switch (kind) {
    case IpmKind::TotalVariation: return 0.5 * span(f);
    case IpmKind::Kantorovich:
    case IpmKind::BoundedLipschitz: {
        double lip = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = i + 1; j < f.size(); ++j) {
                double diff = std::abs(f[i] - f[j]);
                if (diff == 0) continue;
                double d = space.distance(i, j);
                if (d <= 0) throw NumericalError("distinct AIS points at distance 0 carry different values");
                lip = std::max(lip, diff / d);
            }
        if (kind == IpmKind::Kantorovich) return lip;
        double sup = 0;
        for (double v : f) sup = std::max(sup, std::abs(v));
        return sup + lip;
    }
    case IpmKind::Mmd: throw Unsupported("Minkowski functional of the MMD class is not computable here");
    }
    return 0.0;
}

std::vector<double> minkowski_per_stage(const AisGenerator& gen, const ValueTables& vhat, IpmKind kind) {
    if (vhat.stationary) return {minkowski_of_values(gen.stage(1).space, vhat.stages.at(0).value, kind)};
    const std::size_t T = vhat.stages.size();
    std::vector<double> rho(T, 0.0);
    for (std::size_t t = 1; t < T; ++t)
        rho[t - 1] = minkowski_of_values(gen.stage(t + 1).space, vhat.stages[t].value, kind);
    return rho;
}

std::vector<double> history_minkowski_tv(const ValueTables& hv) {
    const std::size_t T = hv.stages.size();
    std::vector<double> rho(T, 0.0);
    for (std::size_t t = 1; t < T; ++t) rho[t - 1] = 0.5 * span(hv.stages[t].value);
    return rho;
}

BoundReport alpha_bounds(const AisCertificate& cert, const std::vector<double>& rho, double discount,
                         BoundVariant variant) {
    const std::size_t T = cert.stages();
    if (rho.size() != T)
        throw ModelError("certificate has " + std::to_string(T) + " stages but " + std::to_string(rho.size()) +
                         " Minkowski values were given");
    if (cert.delta.size() != T) throw ModelError("certificate eps and delta have different lengths");
    BoundReport r;
    r.kind = cert.kind;
    r.variant = variant;
    r.discount = discount;
    r.eps = cert.eps;
    r.delta = cert.delta;
    r.rho = rho;
    r.alpha.assign(T, 0.0);
    r.policy_bound.assign(T, 0.0);
    double next = 0;
    for (std::size_t t = T; t >= 1; --t) {
        double a = cert.eps[t - 1] + discount * (rho[t - 1] * cert.delta[t - 1] + next);
        r.alpha[t - 1] = a;
        r.policy_bound[t - 1] = 2 * a;
        next = a;
    }
    return r;
}

BoundReport alpha_bounds(const AisCertificate& cert, const AisGenerator& gen, const ValueTables& vhat) {
    return alpha_bounds(cert, minkowski_per_stage(gen, vhat, cert.kind), gen.discount);
}

double stationary_alpha(double eps, double delta, double rho, double discount) {
    if (!(discount < 1.0)) throw Unsupported("stationary bound needs discount < 1");
    return (eps + discount * rho * delta) / (1.0 - discount);
}

BoundReport stationary_bound(const AisCertificate& cert, double rho, double discount) {
    BoundReport r;
    r.kind = cert.kind;
    r.discount = discount;
    r.stationary = true;
    r.eps = {cert.max_eps()};
    r.delta = {cert.max_delta()};
    r.rho = {rho};
    double a = stationary_alpha(r.eps[0], r.delta[0], rho, discount);
    r.alpha = {a};
    r.policy_bound = {2 * a};
    return r;
}

// ---------------------------------------------------------------------------

Sandwich make_sandwich(const PomdpModel& m, double J, std::size_t t, std::size_t T) {
    const double g = m.discount;
    if (!(g < 1.0)) throw Unsupported("truncation sandwich needs discount < 1");
    if (t > T) throw ModelError("truncation horizon is before the evaluation stage");
    const double w = std::pow(g, static_cast<double>(T - t)) / (1.0 - g);
    return {J, J + w * m.reward_min(), J + w * m.reward_max()};
}

std::size_t FiniteStateController::node_of(const History& h) const {
    std::size_t n = initial;
    for (const auto& s : h.steps) n = next[(n * n_actions + s.action) * n_observations + s.observation];
    return n;
}

HistoryPolicy FiniteStateController::as_history_policy() const {
    FiniteStateController c = *this;
    return [c](const History& h) {
        std::size_t n = c.node_of(h);
        return ProbVector(std::vector<double>(c.action_prob.begin() + n * c.n_actions,
                                              c.action_prob.begin() + (n + 1) * c.n_actions));
    };
}

FiniteStateController random_controller(std::size_t n_nodes, std::size_t nA, std::size_t nY,
                                        std::mt19937_64& rng) {
    FiniteStateController c;
    c.n_nodes = n_nodes;
    c.n_actions = nA;
    c.n_observations = nY;
    c.action_prob.resize(n_nodes * nA);
    for (std::size_t n = 0; n < n_nodes; ++n) {
        double s = 0;
        for (std::size_t a = 0; a < nA; ++a) s += c.action_prob[n * nA + a] = -std::log(1.0 - uniform01(rng));
        for (std::size_t a = 0; a < nA; ++a) c.action_prob[n * nA + a] /= s;
    }
    c.next.resize(n_nodes * nA * nY);
    for (auto& x : c.next) x = static_cast<std::size_t>(uniform01(rng) * n_nodes) % n_nodes;
    return c;
}

Sandwich truncated_eval_inf(const PomdpModel& m, const FiniteStateController& c, const History& h,
                            std::size_t T) {
    const std::size_t t = h.stage();
    if (t > T) throw ModelError("history is longer than the truncation horizon");
    if (c.n_actions != m.n_actions || c.n_observations != m.n_observations)
        throw ModelError("controller dimensions do not match the model");
    const std::size_t nS = m.n_states, nA = m.n_actions, nY = m.n_observations, N = c.n_nodes;
    const double g = m.discount;
    std::vector<double> W(nS * N, 0.0), Wn(nS * N);
    for (std::size_t k = 0; k < T - t; ++k) {
        for (std::size_t s = 0; s < nS; ++s)
            for (std::size_t n = 0; n < N; ++n) {
                double v = 0;
                for (std::size_t a = 0; a < nA; ++a) {
                    double pa = c.action_prob[n * nA + a];
                    if (pa == 0) continue;
                    double cont = 0;
                    for (std::size_t s2 = 0; s2 < nS; ++s2) {
                        double p = m.T(a, s, s2);
                        if (p == 0) continue;
                        for (std::size_t y = 0; y < nY; ++y) {
                            double o = m.O(a, s2, y);
                            if (o == 0) continue;
                            cont += p * o * W[s2 * N + c.next[(n * nA + a) * nY + y]];
                        }
                    }
                    v += pa * (m.R(s, a) + g * cont);
                }
                Wn[s * N + n] = v;
            }
        std::swap(W, Wn);
    }
    ProbVector b = belief_of(m, h);
    const std::size_t node = c.node_of(h);
    double J = 0;
    for (std::size_t s = 0; s < nS; ++s) J += b[s] * W[s * N + node];
    return make_sandwich(m, J, t, T);
}

std::vector<Sandwich> truncated_optimal_inf(const PomdpModel& m, const std::vector<ProbVector>& beliefs,
                                            std::size_t t, std::size_t T) {
    if (t > T) throw ModelError("evaluation stage is after the truncation horizon");
    std::vector<Sandwich> out;
    if (t == T) {
        for (std::size_t i = 0; i < beliefs.size(); ++i) out.push_back(make_sandwich(m, 0.0, t, T));
        return out;
    }
    BeliefQuantOptions opt;
    opt.seeds = beliefs;
    opt.point_cap = kDefaultNodeCap;
    AisGenerator gen = build_belief_quant_ais(m, T - t, 0, IpmKind::TotalVariation, opt);
    ValueTables v = ais_dp(gen, T - t);
    const auto& pts = gen.stages[0].space.points;
    for (const auto& b : beliefs) {
        std::size_t idx = kNoNode;
        for (std::size_t z = 0; z < pts.size() && idx == kNoNode; ++z) {
            double d = 0;
            for (std::size_t s = 0; s < b.size(); ++s) d += std::abs(pts[z][s] - b[s]);
            if (d <= 1e-9) idx = z;
        }
        if (idx == kNoNode) throw NumericalError("seed belief missing from the exact belief space");
        out.push_back(make_sandwich(m, v.stages[0].value[idx], t, T));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> bellman_operator(const AisGenerator& gen, const std::vector<double>& V) {
    const AisStage& st = gen.stage(1);
    const std::size_t nZ = st.space.size, nA = gen.n_actions;
    if (V.size() != nZ) throw ModelError("value vector does not match the AIS space");
    const auto acts = gen.allowed_actions();
    std::vector<double> out(nZ);
    for (std::size_t z = 0; z < nZ; ++z) {
        double best = -INFINITY;
        for (auto a : acts) {
            double q = st.reward[z * nA + a];
            for (auto [z2, p] : st.kernel[z * nA + a]) q += gen.discount * p * V[z2];
            best = std::max(best, q);
        }
        out[z] = best;
    }
    return out;
}

ValueIterationResult ais_value_iteration(const AisGenerator& gen, double tol, bool keep_iterates,
                                         std::size_t max_iterations) {
    if (!gen.stationary) throw ModelError("value iteration needs a stationary generator");
    const double g = gen.discount;
    if (!(g < 1.0)) throw Unsupported("value iteration needs discount < 1");
    if (!(tol > 0)) throw ModelError("tolerance must be positive");
    const std::size_t nZ = gen.stage(1).space.size;
    const double stop = g > 0 ? tol * (1.0 - g) / (2.0 * g) : INFINITY;
    ValueIterationResult res;
    std::vector<double> V(nZ, 0.0);
    if (keep_iterates) res.iterates.push_back(V);
    for (;;) {
        auto W = bellman_operator(gen, V);
        double r = 0;
        for (std::size_t z = 0; z < nZ; ++z) r = std::max(r, std::abs(W[z] - V[z]));
        V = std::move(W);
        ++res.iterations;
        if (keep_iterates) res.iterates.push_back(V);
        res.residual = r;
        if (!std::isfinite(r)) throw NumericalError("value iteration diverged");
        if (r <= stop) break;
        if (res.iterations >= max_iterations)
            throw NumericalError("value iteration did not converge in " + std::to_string(max_iterations) +
                                 " iterations");
    }
    // One greedy read-out at the final iterate.
    ValueTables vt;
    vt.n_actions = gen.n_actions;
    vt.discount = g;
    vt.stationary = true;
    StageTable st;
    const AisStage& as = gen.stage(1);
    const std::size_t nA = gen.n_actions;
    const auto acts = gen.allowed_actions();
    st.value = V;
    st.q.assign(nZ * nA, 0.0);
    st.greedy.assign(nZ, 0);
    st.keys.resize(nZ);
    for (std::size_t z = 0; z < nZ; ++z) {
        st.keys[z] = "z" + std::to_string(z);
        for (std::size_t a = 0; a < nA; ++a) {
            const std::size_t ah = gen.quantize_action(a);
            double q = as.reward[z * nA + ah];
            for (auto [z2, p] : as.kernel[z * nA + ah]) q += g * p * V[z2];
            st.q[z * nA + a] = q;
        }
        std::size_t best = acts.front();
        for (auto a : acts)
            if (st.q[z * nA + a] > st.q[z * nA + best]) best = a;
        st.greedy[z] = best;
    }
    vt.stages.push_back(std::move(st));
    res.tables = std::move(vt);
    return res;
}

ValueNormBounds value_norm_bounds(double span_r, double sup_r, double g,
                                  std::optional<std::pair<double, double>> lip) {
    if (!(g < 1.0)) throw Unsupported("value norm bounds need discount < 1");
    ValueNormBounds b;
    b.span_bound = span_r / (1.0 - g);
    b.tv_bound = 0.5 * b.span_bound;
    b.bl_bound = 2.0 * sup_r / (1.0 - g);
    if (lip) {
        auto [Lr, Lp] = *lip;
        if (!(g * Lp < 1.0)) throw ModelError("Lipschitz value bound needs gamma L_p < 1");
        b.lipschitz_bound = Lr / (1.0 - g * Lp);
    }
    return b;
}

ValueNormBounds value_norm_bounds(const PomdpModel& m, std::optional<std::pair<double, double>> lip) {
    return value_norm_bounds(m.reward_span(), m.reward_sup_norm(), m.discount, lip);
}

// ---------------------------------------------------------------------------

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::Abel: return "abel";
    case Scenario::DeepMdp: return "deepmdp";
    case Scenario::FrancoisLavet: return "francois-lavet";
    case Scenario::Lifelong: return "lifelong";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    if (s == "abel") return Scenario::Abel;
    if (s == "deepmdp") return Scenario::DeepMdp;
    if (s == "francois-lavet" || s == "fl") return Scenario::FrancoisLavet;
    if (s == "lifelong") return Scenario::Lifelong;
    throw ModelError("unknown scenario \"" + s + "\" (allowed: abel, deepmdp, francois-lavet, lifelong)");
}

Comparison compare_bounds(Scenario sc, const ScenarioParams& p) {
    const double g = p.discount;
    if (!(g > 0 && g < 1)) throw ModelError("scenario discount must lie in (0, 1)");
    if (p.eps < 0 || p.delta < 0) throw ModelError("scenario eps and delta must be nonnegative");
    const double u = 1.0 - g;
    Comparison c;
    c.scenario = sc;
    double factor = 2.0; // policy bound is 2 alpha except for action quantizers
    switch (sc) {
    case Scenario::Abel:
        if (p.n_states == 0 || p.n_abstract == 0) throw ModelError("abel scenario needs |S| and |S_hat|");
        c.ais_eps = p.eps;
        c.ais_delta = p.eps * static_cast<double>(p.n_abstract);
        c.ais_rho = value_norm_bounds(p.span_r, p.sup_r, g).tv_bound;
        c.literature_bound = 2 * p.eps / (u * u) +
                             2 * g * p.eps * static_cast<double>(p.n_states) * p.sup_r / (u * u * u);
        break;
    case Scenario::DeepMdp:
        c.ais_eps = p.eps;
        c.ais_delta = p.delta;
        c.ais_rho = *value_norm_bounds(p.span_r, p.sup_r, g, std::make_pair(p.L_r, p.L_p)).lipschitz_bound;
        c.literature_bound = 2 * p.eps / u + 2 * g * p.delta * p.L_r / (u * (1 - g * p.L_p));
        break;
    case Scenario::FrancoisLavet:
        c.ais_eps = p.eps * p.sup_r;
        c.ais_delta = 3 * p.eps;
        c.ais_rho = value_norm_bounds(p.span_r, p.sup_r, g).bl_bound;
        c.literature_bound = 2 * p.eps * p.sup_r / (u * u * u);
        break;
    case Scenario::Lifelong:
        factor = 1.0;
        c.ais_eps = 0;
        c.ais_delta = p.lipschitz * p.eta + p.zeta;
        c.ais_rho = value_norm_bounds(p.span_r, p.sup_r, g).tv_bound;
        c.literature_bound = g * c.ais_delta * p.sup_r / (u * u);
        break;
    }
    c.ais_bound = factor * stationary_alpha(c.ais_eps, c.ais_delta, c.ais_rho, g);
    c.ratio = c.literature_bound > 0 ? c.ais_bound / c.literature_bound : 0.0;
    return c;
}

} // namespace aisplan
