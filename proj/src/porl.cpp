#include "aisplan/porl.hpp"

#include "aisplan/ais_io.hpp"
#include "aisplan/error.hpp"
#include "aisplan/planning_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aisplan {

namespace {

std::vector<double> softmax(const double* x, std::size_t n) {
    double mx = x[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
    std::vector<double> p(n);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += p[i] = std::exp(x[i] - mx);
    for (double& v : p) v /= s;
    return p;
}

/// d/dlogits of sum_j d_j p_j for p = softmax(logits).
void softmax_backward(const std::vector<double>& p, const std::vector<double>& d, double w, double* out) {
    double m = 0;
    for (std::size_t j = 0; j < p.size(); ++j) m += p[j] * d[j];
    for (std::size_t j = 0; j < p.size(); ++j) out[j] += w * p[j] * (d[j] - m);
}

std::size_t sample(std::mt19937_64& rng, const std::vector<double>& p) { return sample_index(rng, p); }

} // namespace

LearnedAis::LearnedAis(std::size_t k_, std::size_t nA, std::size_t nY)
    : k(k_), n_actions(nA), n_observations(nY) {
    if (k == 0) throw ModelError("latent alphabet size must be positive");
    params.assign(obs_offset() + k * nA * nY, 0.0);
}

std::vector<double> LearnedAis::initial() const { return softmax(&params[init_offset()], k); }

std::vector<double> LearnedAis::next(std::size_t z, std::size_t a, std::size_t y) const {
    return softmax(&params[trans_offset() + ((z * n_actions + a) * n_observations + y) * k], k);
}

std::vector<double> LearnedAis::obs_predictor(std::size_t z, std::size_t a) const {
    return softmax(&params[obs_offset() + (z * n_actions + a) * n_observations], n_observations);
}

SoftmaxPolicy::SoftmaxPolicy(std::size_t k_, std::size_t nA) : k(k_), n_actions(nA), logits(k_ * nA, 0.0) {}

std::vector<double> SoftmaxPolicy::probs(std::size_t z) const { return softmax(&logits[z * n_actions], n_actions); }

std::string to_string(AisLossKind k) { return k == AisLossKind::CrossEntropy ? "kl" : "mmd"; }

AisLossKind parse_loss_kind(const std::string& s) {
    if (s == "kl" || s == "cross-entropy") return AisLossKind::CrossEntropy;
    if (s == "mmd" || s == "mmd2") return AisLossKind::Mmd2;
    throw ModelError("unknown loss \"" + s + "\" (allowed: kl, mmd)");
}

PorlTrajectory rollout(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi, std::size_t T,
                       std::mt19937_64& rng) {
    PorlTrajectory tr;
    std::size_t s = sample(rng, env.initial_belief.values());
    std::size_t z = sample(rng, ais.initial());
    const std::size_t nS = env.n_states, nY = env.n_observations;
    std::vector<double> row(nS), orow(nY);
    for (std::size_t t = 0; t < T; ++t) {
        std::size_t a = sample(rng, pi.probs(z));
        double r = env.R(s, a);
        for (std::size_t s2 = 0; s2 < nS; ++s2) row[s2] = env.T(a, s, s2);
        std::size_t s2 = sample_index(rng, row);
        for (std::size_t y = 0; y < nY; ++y) orow[y] = env.O(a, s2, y);
        std::size_t y = sample_index(rng, orow);
        tr.steps.push_back({z, a, r, y});
        z = sample(rng, ais.next(z, a, y));
        s = s2;
    }
    tr.final_z = z;
    tr.final_action = sample(rng, pi.probs(z));
    return tr;
}

// ---------------------------------------------------------------------------

namespace {

/// Per-step loss c(z) and its gradient wrt the reward head and observation logits.
double step_cost(const LearnedAis& ais, std::size_t z, const PorlStep& st, double lambda, AisLossKind kind,
                 double w, std::vector<double>* grad) {
    const std::size_t nA = ais.n_actions, nY = ais.n_observations;
    const double rh = ais.reward(z, st.action);
    const auto nu = ais.obs_predictor(z, st.action);
    double ell;
    std::vector<double> d(nY, 0.0);
    if (kind == AisLossKind::CrossEntropy) {
        if (nu[st.observation] <= 0)
            throw NumericalError("predicted observation probability is zero on an observed symbol");
        ell = -std::log(nu[st.observation]);
        d[st.observation] = -1.0 / nu[st.observation];
    } else {
        ell = 0;
        for (std::size_t j = 0; j < nY; ++j) {
            double x = j == st.observation ? 1.0 : 0.0;
            ell += (nu[j] - 2 * x) * nu[j];
            d[j] = 2 * (nu[j] - x);
        }
    }
    const double c = lambda * (st.reward - rh) * (st.reward - rh) + (1 - lambda) * ell;
    if (grad) {
        (*grad)[ais.reward_offset() + z * nA + st.action] += w * lambda * 2 * (rh - st.reward);
        softmax_backward(nu, d, w * (1 - lambda), &(*grad)[ais.obs_offset() + (z * nA + st.action) * nY]);
    }
    return c;
}

void check_traj(const PorlTrajectory& tr, const LearnedAis& ais) {
    if (tr.steps.empty()) throw ModelError("empty trajectory");
    for (auto& s : tr.steps)
        if (s.z >= ais.k || s.action >= ais.n_actions || s.observation >= ais.n_observations)
            throw ModelError("trajectory indices outside the learned AIS dimensions");
}

} // namespace

double ais_path_loss(const PorlTrajectory& tr, const LearnedAis& ais, double lambda, AisLossKind kind) {
    check_traj(tr, ais);
    double L = 0;
    for (auto& st : tr.steps) L += step_cost(ais, st.z, st, lambda, kind, 0, nullptr);
    return L / static_cast<double>(tr.steps.size());
}

LossAndGrad ais_loss(const PorlTrajectory& tr, const LearnedAis& ais, double lambda, AisLossKind kind) {
    check_traj(tr, ais);
    const std::size_t T = tr.steps.size(), k = ais.k, nA = ais.n_actions, nY = ais.n_observations;
    const double invT = 1.0 / static_cast<double>(T);
    LossAndGrad out;
    out.grad.assign(ais.params.size(), 0.0);
    std::vector<double> c(T);
    for (std::size_t t = 0; t < T; ++t) c[t] = step_cost(ais, tr.steps[t].z, tr.steps[t], lambda, kind, invT, &out.grad);
    // Score-function terms: the choice of z_{t+1} influences costs t+1..T.
    std::vector<double> tail(T + 1, 0.0);
    for (std::size_t t = T; t-- > 0;) tail[t] = tail[t + 1] + c[t] * invT;
    out.value = tail[0];
    auto p0 = ais.initial();
    std::vector<double> e(k, 0.0);
    e[tr.steps[0].z] = 1.0;
    for (std::size_t j = 0; j < k; ++j) out.grad[ais.init_offset() + j] += tail[0] * (e[j] - p0[j]);
    for (std::size_t t = 0; t + 1 < T; ++t) {
        const auto& st = tr.steps[t];
        auto p = ais.next(st.z, st.action, st.observation);
        const std::size_t off = ais.trans_offset() + ((st.z * nA + st.action) * nY + st.observation) * k;
        const std::size_t zn = tr.steps[t + 1].z;
        for (std::size_t j = 0; j < k; ++j) out.grad[off + j] += tail[t + 1] * ((j == zn ? 1.0 : 0.0) - p[j]);
    }
    return out;
}

LossAndGrad ais_loss_expected(const PorlTrajectory& tr, const LearnedAis& ais, double lambda, AisLossKind kind) {
    check_traj(tr, ais);
    const std::size_t T = tr.steps.size(), k = ais.k, nA = ais.n_actions, nY = ais.n_observations;
    const double invT = 1.0 / static_cast<double>(T);
    // Forward marginals q_t.
    std::vector<std::vector<double>> q(T);
    q[0] = ais.initial();
    for (std::size_t t = 0; t + 1 < T; ++t) {
        q[t + 1].assign(k, 0.0);
        const auto& st = tr.steps[t];
        for (std::size_t z = 0; z < k; ++z) {
            auto p = ais.next(z, st.action, st.observation);
            for (std::size_t j = 0; j < k; ++j) q[t + 1][j] += q[t][z] * p[j];
        }
    }
    LossAndGrad out;
    out.grad.assign(ais.params.size(), 0.0);
    std::vector<std::vector<double>> cost(T, std::vector<double>(k));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t z = 0; z < k; ++z) {
            cost[t][z] = step_cost(ais, z, tr.steps[t], lambda, kind, q[t][z] * invT, &out.grad);
            out.value += q[t][z] * cost[t][z] * invT;
        }
    // Backward: g_t(z) = dE/dq_t(z).
    std::vector<double> g(k, 0.0), gprev(k);
    for (std::size_t t = T; t-- > 0;) {
        for (std::size_t z = 0; z < k; ++z) gprev[z] = cost[t][z] * invT;
        if (t + 1 < T) {
            const auto& st = tr.steps[t];
            for (std::size_t z = 0; z < k; ++z) {
                auto p = ais.next(z, st.action, st.observation);
                double m = 0;
                for (std::size_t j = 0; j < k; ++j) m += p[j] * g[j];
                gprev[z] += m;
                const std::size_t off = ais.trans_offset() + ((z * nA + st.action) * nY + st.observation) * k;
                softmax_backward(p, g, q[t][z], &out.grad[off]);
            }
        }
        std::swap(g, gprev);
    }
    softmax_backward(ais.initial(), g, 1.0, &out.grad[ais.init_offset()]);
    return out;
}

std::vector<double> gpomdp_gradient(const PorlTrajectory& tr, double discount, const SoftmaxPolicy& pi) {
    const std::size_t nA = pi.n_actions;
    std::vector<double> grad(pi.logits.size(), 0.0), acc(pi.logits.size(), 0.0);
    double w = 1.0;
    for (const auto& st : tr.steps) {
        auto p = pi.probs(st.z);
        for (std::size_t a = 0; a < nA; ++a) acc[st.z * nA + a] += (a == st.action ? 1.0 : 0.0) - p[a];
        if (st.reward != 0)
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += acc[i] * w * st.reward;
        w *= discount;
    }
    return grad;
}

std::vector<double> actor_critic_gradient(const PorlTrajectory& tr, double discount, const SoftmaxPolicy& pi,
                                          const Critic& critic) {
    if (!(discount < 1.0)) throw Unsupported("actor-critic gradient needs discount < 1");
    const std::size_t nA = pi.n_actions, T = tr.steps.size();
    std::vector<double> grad(pi.logits.size(), 0.0);
    const double scale = 1.0 / ((1.0 - discount) * static_cast<double>(T));
    for (const auto& st : tr.steps) {
        auto p = pi.probs(st.z);
        const double q = critic.q[st.z * nA + st.action];
        for (std::size_t a = 0; a < nA; ++a)
            grad[st.z * nA + a] += scale * q * ((a == st.action ? 1.0 : 0.0) - p[a]);
    }
    return grad;
}

double smooth_l1(double x) { return std::abs(x) < 1 ? 0.5 * x * x : std::abs(x) - 0.5; }

LossAndGrad td_loss(const PorlTrajectory& tr, double discount, const Critic& critic) {
    const std::size_t nA = critic.n_actions, T = tr.steps.size();
    if (T == 0) throw ModelError("empty trajectory");
    LossAndGrad out;
    out.grad.assign(critic.q.size(), 0.0);
    const double invT = 1.0 / static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto& st = tr.steps[t];
        const std::size_t i = st.z * nA + st.action;
        const std::size_t j = t + 1 < T ? tr.steps[t + 1].z * nA + tr.steps[t + 1].action
                                        : tr.final_z * nA + tr.final_action;
        const double x = critic.q[i] - st.reward - discount * critic.q[j];
        out.value += smooth_l1(x) * invT;
        const double d = (std::abs(x) < 1 ? x : (x > 0 ? 1.0 : -1.0)) * invT;
        out.grad[i] += d;
        out.grad[j] -= discount * d;
    }
    return out;
}

// ---------------------------------------------------------------------------

double TrainConfig::a(std::size_t k) const { return a0 / std::pow(1.0 + static_cast<double>(k), 0.6); }
double TrainConfig::b(std::size_t k) const { return b0 / std::pow(1.0 + static_cast<double>(k), 0.8); }
double TrainConfig::c(std::size_t k) const { return c0 / std::pow(1.0 + static_cast<double>(k), 0.7); }

void TrainConfig::validate() const {
    if (k == 0) throw ModelError("k must be positive");
    if (!(lambda >= 0 && lambda <= 1)) throw ModelError("lambda must lie in [0, 1]");
    if (rollout == 0) throw ModelError("rollout length must be positive");
    if (a0 < 0 || b0 < 0 || c0 < 0) throw ModelError("learning rates must be nonnegative");
    if (eval_every == 0) throw ModelError("eval_every must be positive");
    if (!(divergence_limit > 0)) throw ModelError("divergence limit must be positive");
}

bool ScheduleCheck::ok() const {
    return a_sum_diverges && a_square_summable && b_sum_diverges && b_square_summable && c_sum_diverges &&
           c_square_summable && b_over_a_vanishes && c_over_a_vanishes && b_over_c_vanishes;
}

ScheduleCheck check_schedules() {
    // x_k = x0 / (1+k)^p: sum diverges iff p <= 1, squares sum iff 2p > 1.
    const double pa = 0.6, pb = 0.8, pc = 0.7;
    ScheduleCheck s{};
    s.a_sum_diverges = pa <= 1;
    s.a_square_summable = 2 * pa > 1;
    s.b_sum_diverges = pb <= 1;
    s.b_square_summable = 2 * pb > 1;
    s.c_sum_diverges = pc <= 1;
    s.c_square_summable = 2 * pc > 1;
    s.b_over_a_vanishes = pb > pa;
    s.c_over_a_vanishes = pc > pa;
    s.b_over_c_vanishes = pb > pc;
    return s;
}

void init_parameters(LearnedAis& ais, SoftmaxPolicy& pi, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> nd(0.0, 1.0);
    // Heads start at zero; only the latent dynamics are randomized so the
    // symbols can be told apart.
    for (std::size_t i = 0; i < ais.reward_offset(); ++i) ais.params[i] = scale * nd(rng);
    for (double& v : pi.logits) v = 0.0;
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TrainResult train(const PomdpModel& env, const TrainConfig& cfg) {
    cfg.validate();
    validate_model(env);
    const std::size_t nA = env.n_actions, nY = env.n_observations;
    TrainResult res;
    res.ais = LearnedAis(cfg.k, nA, nY);
    res.policy = SoftmaxPolicy(cfg.k, nA);
    res.critic = Critic{cfg.k, nA, std::vector<double>(cfg.k * nA, 0.0)};
    std::mt19937_64 rng(cfg.seed);
    init_parameters(res.ais, res.policy, rng, cfg.init_scale);
    double loss_acc = 0;
    std::size_t loss_n = 0;
    for (std::size_t it = 1; it <= cfg.episodes; ++it) {
        PorlTrajectory tr = rollout(env, res.ais, res.policy, cfg.rollout, rng);
        LossAndGrad L = ais_loss(tr, res.ais, cfg.lambda, cfg.loss);
        std::vector<double> gJ = cfg.critic ? actor_critic_gradient(tr, env.discount, res.policy, res.critic)
                                            : gpomdp_gradient(tr, env.discount, res.policy);
        const double ak = cfg.a(it), bk = cfg.b(it);
        for (std::size_t i = 0; i < L.grad.size(); ++i) res.ais.params[i] -= ak * L.grad[i];
        for (std::size_t i = 0; i < gJ.size(); ++i) res.policy.logits[i] += bk * gJ[i];
        if (cfg.critic) {
            LossAndGrad td = td_loss(tr, env.discount, res.critic);
            const double ck = cfg.c(it);
            for (std::size_t i = 0; i < td.grad.size(); ++i) res.critic.q[i] -= ck * td.grad[i];
        }
        loss_acc += L.value;
        ++loss_n;
        const double n_ais = norm2(res.ais.params), n_pi = norm2(res.policy.logits), n_q = norm2(res.critic.q);
        if (!(n_ais <= cfg.divergence_limit && n_pi <= cfg.divergence_limit && n_q <= cfg.divergence_limit))
            throw DivergenceError("parameters diverged at iteration " + std::to_string(it) + " (|ais| = " +
                                  format_number(n_ais) + ", |policy| = " + format_number(n_pi) +
                                  ", |critic| = " + format_number(n_q) + ")");
        if (it % cfg.eval_every == 0 || it == cfg.episodes) {
            EvalResult ev = evaluate_policy(env, res.ais, res.policy, cfg.eval_episodes, cfg.rollout,
                                            cfg.seed * 1000003ull + it);
            res.curve.push_back({it, ev.mean, ev.stderr_, loss_acc / static_cast<double>(loss_n)});
            loss_acc = 0;
            loss_n = 0;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

std::vector<double> latent_marginal(const LearnedAis& ais, const History& h) {
    std::vector<double> q = ais.initial();
    for (const auto& s : h.steps) {
        std::vector<double> nq(ais.k, 0.0);
        for (std::size_t z = 0; z < ais.k; ++z) {
            if (q[z] == 0) continue;
            auto p = ais.next(z, s.action, s.observation);
            for (std::size_t j = 0; j < ais.k; ++j) nq[j] += q[z] * p[j];
        }
        q = std::move(nq);
    }
    return q;
}

HistoryPolicy marginalized_policy(const LearnedAis& ais, const SoftmaxPolicy& pi) {
    return [ais, pi](const History& h) {
        auto q = latent_marginal(ais, h);
        std::vector<double> p(pi.n_actions, 0.0);
        for (std::size_t z = 0; z < ais.k; ++z) {
            auto r = pi.probs(z);
            for (std::size_t a = 0; a < pi.n_actions; ++a) p[a] += q[z] * r[a];
        }
        double s = 0;
        for (double v : p) s += v;
        for (double& v : p) v /= s;
        return ProbVector(std::move(p));
    };
}

EvalResult evaluate_policy(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi,
                           std::size_t episodes, std::size_t horizon, std::uint64_t seed) {
    if (episodes == 0) throw ModelError("evaluation needs at least one episode");
    // The marginalized policy is applied incrementally rather than through
    // simulate() so each step costs O(k^2) instead of O(t k^2).
    std::mt19937_64 rng(seed);
    const std::size_t nS = env.n_states, nY = env.n_observations, nA = env.n_actions, k = ais.k;
    std::vector<double> returns;
    returns.reserve(episodes);
    std::vector<double> row(nS), orow(nY), pa(nA);
    for (std::size_t e = 0; e < episodes; ++e) {
        std::size_t s = sample_index(rng, env.initial_belief.values());
        std::vector<double> q = ais.initial();
        double ret = 0, w = 1;
        for (std::size_t t = 0; t < horizon; ++t) {
            std::fill(pa.begin(), pa.end(), 0.0);
            for (std::size_t z = 0; z < k; ++z) {
                auto r = pi.probs(z);
                for (std::size_t a = 0; a < nA; ++a) pa[a] += q[z] * r[a];
            }
            std::size_t a = sample_index(rng, pa);
            ret += w * env.R(s, a);
            w *= env.discount;
            for (std::size_t s2 = 0; s2 < nS; ++s2) row[s2] = env.T(a, s, s2);
            std::size_t s2 = sample_index(rng, row);
            for (std::size_t y = 0; y < nY; ++y) orow[y] = env.O(a, s2, y);
            std::size_t y = sample_index(rng, orow);
            std::vector<double> nq(k, 0.0);
            for (std::size_t z = 0; z < k; ++z) {
                auto p = ais.next(z, a, y);
                for (std::size_t j = 0; j < k; ++j) nq[j] += q[z] * p[j];
            }
            q = std::move(nq);
            s = s2;
        }
        returns.push_back(ret);
    }
    EvalResult r;
    r.episodes = episodes;
    double m = 0;
    for (double x : returns) m += x;
    m /= static_cast<double>(episodes);
    double v = 0;
    for (double x : returns) v += (x - m) * (x - m);
    r.mean = m;
    r.stderr_ = episodes > 1 ? std::sqrt(v / static_cast<double>(episodes - 1) / static_cast<double>(episodes)) : 0.0;
    return r;
}

namespace {

double action_prob_rec(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi, std::size_t action,
                       const ProbVector& b, const std::vector<double>& q, std::size_t depth, std::size_t horizon) {
    const std::size_t nA = env.n_actions, nY = env.n_observations, k = ais.k;
    std::vector<double> pa(nA, 0.0);
    for (std::size_t z = 0; z < k; ++z) {
        auto r = pi.probs(z);
        for (std::size_t a = 0; a < nA; ++a) pa[a] += q[z] * r[a];
    }
    double total = pa[action];
    if (depth + 1 == horizon) return total;
    for (std::size_t a = 0; a < nA; ++a) {
        if (pa[a] == 0) continue;
        auto psi = obs_likelihood(env, b, a);
        for (std::size_t y = 0; y < nY; ++y) {
            if (psi[y] <= 0) continue;
            std::vector<double> nq(k, 0.0);
            for (std::size_t z = 0; z < k; ++z) {
                auto p = ais.next(z, a, y);
                for (std::size_t j = 0; j < k; ++j) nq[j] += q[z] * p[j];
            }
            total += pa[a] * psi[y] *
                     action_prob_rec(env, ais, pi, action, belief_update(env, b, a, y), nq, depth + 1, horizon);
        }
    }
    return total;
}

} // namespace

double action_probability(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi,
                          std::size_t action, std::size_t horizon) {
    if (horizon == 0 || horizon > kDefaultHistoryCap) throw ModelError("action probability horizon must be in 1..8");
    return action_prob_rec(env, ais, pi, action, env.initial_belief, ais.initial(), 0, horizon) /
           static_cast<double>(horizon);
}

AisGenerator to_generator(const LearnedAis& ais, double discount) {
    const std::size_t k = ais.k, nA = ais.n_actions, nY = ais.n_observations;
    AisGenerator g;
    g.n_actions = nA;
    g.n_observations = nY;
    g.discount = discount;
    g.stationary = true;
    g.stochastic = true;
    AisStage st;
    st.space.size = k;
    st.space.metric = GroundMetricKind::Discrete;
    st.reward.resize(k * nA);
    st.kernel.resize(k * nA);
    for (std::size_t z = 0; z < k; ++z)
        for (std::size_t a = 0; a < nA; ++a) {
            st.reward[z * nA + a] = ais.reward(z, a);
            auto nu = ais.obs_predictor(z, a);
            std::vector<double> row(k, 0.0);
            for (std::size_t y = 0; y < nY; ++y) {
                auto p = ais.next(z, a, y);
                for (std::size_t j = 0; j < k; ++j) row[j] += nu[y] * p[j];
            }
            st.kernel[z * nA + a] = to_sparse(row);
        }
    g.stages.push_back(std::move(st));
    g.compress = [ais](const History& h) { return to_sparse(latent_marginal(ais, h)); };
    g.descriptor.kind = "custom";
    return g;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream os;
    os << "iteration,mean_return,stderr,ais_loss\n";
    for (const auto& p : curve)
        os << p.iteration << "," << format_number(p.mean_return) << "," << format_number(p.stderr_return) << ","
           << format_number(p.ais_loss) << "\n";
    return os.str();
}

std::string checkpoint_json(const TrainResult& r, double discount) {
    nlohmann::json j;
    j["k"] = r.ais.k;
    j["actions"] = r.ais.n_actions;
    j["observations"] = r.ais.n_observations;
    j["ais_params"] = r.ais.params;
    j["policy_logits"] = r.policy.logits;
    j["critic"] = r.critic.q;
    j["generator"] = nlohmann::json::parse(serialize_generator(to_generator(r.ais, discount)));
    return j.dump(2) + "\n";
}

} // namespace aisplan
