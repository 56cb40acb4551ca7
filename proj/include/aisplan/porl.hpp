#pragma once

#include "aisplan/ais.hpp"
#include "aisplan/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace aisplan {

/// Finite stochastic automaton over k latent symbols. Parameters are kept in
/// one flat vector so gradients share the layout:
///   init logits        [k]
///   transition logits  [((z * nA + a) * nY + y) * k + z']
///   reward head        [z * nA + a]
///   observation logits [(z * nA + a) * nY + y]
struct LearnedAis {
    std::size_t k = 0, n_actions = 0, n_observations = 0;
    std::vector<double> params;

    LearnedAis() = default;
    LearnedAis(std::size_t k, std::size_t nA, std::size_t nY);

    std::size_t init_offset() const { return 0; }
    std::size_t trans_offset() const { return k; }
    std::size_t reward_offset() const { return k + k * n_actions * n_observations * k; }
    std::size_t obs_offset() const { return reward_offset() + k * n_actions; }

    std::vector<double> initial() const;
    std::vector<double> next(std::size_t z, std::size_t a, std::size_t y) const;
    double reward(std::size_t z, std::size_t a) const { return params[reward_offset() + z * n_actions + a]; }
    std::vector<double> obs_predictor(std::size_t z, std::size_t a) const;
};

struct SoftmaxPolicy {
    std::size_t k = 0, n_actions = 0;
    std::vector<double> logits; // [z * nA + a]

    SoftmaxPolicy() = default;
    SoftmaxPolicy(std::size_t k, std::size_t nA);
    std::vector<double> probs(std::size_t z) const;
};

/// Tabular critic Q(z, a).
struct Critic {
    std::size_t k = 0, n_actions = 0;
    std::vector<double> q; // [z * nA + a]
};

enum class AisLossKind { CrossEntropy, Mmd2 };
std::string to_string(AisLossKind k);
AisLossKind parse_loss_kind(const std::string& s);

struct PorlStep {
    std::size_t z;      // latent symbol at t
    std::size_t action;
    double reward;
    std::size_t observation; // emitted after the action
};

struct PorlTrajectory {
    std::vector<PorlStep> steps;
    std::size_t final_z = 0;      // z_{T+1}
    std::size_t final_action = 0; // a_{T+1} ~ pi(. | z_{T+1})
};

PorlTrajectory rollout(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi, std::size_t T,
                       std::mt19937_64& rng);

struct LossAndGrad {
    double value = 0;
    std::vector<double> grad;
};

/// Sampled estimator on the trajectory's latent path: direct gradients for the
/// heads plus the score-function term for the initial and transition logits.
LossAndGrad ais_loss(const PorlTrajectory& traj, const LearnedAis& ais, double lambda, AisLossKind kind);
/// Exact expectation over the latent path for fixed (a, y, R), and its gradient.
LossAndGrad ais_loss_expected(const PorlTrajectory& traj, const LearnedAis& ais, double lambda,
                              AisLossKind kind);
/// Loss of one fixed latent path (no expectation).
double ais_path_loss(const PorlTrajectory& traj, const LearnedAis& ais, double lambda, AisLossKind kind);

/// sum_t (sum_{tau <= t} grad log pi(a_tau | z_tau)) gamma^{t-1} R_t.
std::vector<double> gpomdp_gradient(const PorlTrajectory& traj, double discount, const SoftmaxPolicy& pi);
/// 1 / ((1 - gamma) T) sum_t grad log pi(a_t | z_t) Q(z_t, a_t).
std::vector<double> actor_critic_gradient(const PorlTrajectory& traj, double discount, const SoftmaxPolicy& pi,
                                          const Critic& critic);

double smooth_l1(double x);
/// (1/T) sum_t smoothL1(Q(z_t,a_t) - R_t - gamma Q(z_{t+1},a_{t+1})), gradient
/// through both Q terms.
LossAndGrad td_loss(const PorlTrajectory& traj, double discount, const Critic& critic);

struct TrainConfig {
    std::size_t k = 8;
    double lambda = 0.5;
    AisLossKind loss = AisLossKind::CrossEntropy;
    std::size_t rollout = 50;
    std::size_t episodes = 5000;
    double a0 = 0.5, b0 = 0.1, c0 = 0.2;
    bool critic = false;
    std::uint64_t seed = 0;
    std::size_t eval_every = 500;
    std::size_t eval_episodes = 100;
    double init_scale = 0.1;
    double divergence_limit = 1e6;

    double a(std::size_t k) const; // a0 / (1 + k)^0.6
    double b(std::size_t k) const; // b0 / (1 + k)^0.8
    double c(std::size_t k) const; // c0 / (1 + k)^0.7
    /// Throws ModelError on out-of-range fields.
    void validate() const;
};

struct ScheduleCheck {
    bool a_sum_diverges, a_square_summable;
    bool b_sum_diverges, b_square_summable;
    bool c_sum_diverges, c_square_summable;
    bool b_over_a_vanishes, c_over_a_vanishes, b_over_c_vanishes;
    bool ok() const;
};
/// Conditions read off the exponents of the schedule family.
ScheduleCheck check_schedules();

struct CurvePoint {
    std::size_t iteration;
    double mean_return;
    double stderr_return;
    double ais_loss; // mean sampled loss since the previous point
};

struct TrainResult {
    LearnedAis ais;
    SoftmaxPolicy policy;
    Critic critic;
    std::vector<CurvePoint> curve;
};

TrainResult train(const PomdpModel& env, const TrainConfig& cfg);

/// Initial parameters drawn as train() would.
void init_parameters(LearnedAis& ais, SoftmaxPolicy& pi, std::mt19937_64& rng, double scale);

/// History policy acting on the forward marginal q'(z') = sum_z q(z) P(z'|z,a,y).
HistoryPolicy marginalized_policy(const LearnedAis& ais, const SoftmaxPolicy& pi);
/// Forward marginal of the latent symbol after h.
std::vector<double> latent_marginal(const LearnedAis& ais, const History& h);

struct EvalResult {
    double mean = 0;
    double stderr_ = 0;
    std::size_t episodes = 0;
};

/// Monte Carlo discounted return of the marginalized policy.
EvalResult evaluate_policy(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi,
                           std::size_t episodes, std::size_t horizon, std::uint64_t seed);

/// Probability that the marginalized policy plays `action`, averaged over the
/// first `horizon` steps (exact forward computation).
double action_probability(const PomdpModel& env, const LearnedAis& ais, const SoftmaxPolicy& pi,
                          std::size_t action, std::size_t horizon);

/// Stationary stochastic AIS generator: kernel sum_y nu(y|z,a) P(z'|z,a,y),
/// compression = latent_marginal, discrete ground metric.
AisGenerator to_generator(const LearnedAis& ais, double discount);

std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string checkpoint_json(const TrainResult& r, double discount);

} // namespace aisplan
