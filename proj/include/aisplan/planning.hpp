#pragma once

#include "aisplan/ais.hpp"
#include "aisplan/history_tree.hpp"
#include "aisplan/model.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace aisplan {

/// Values of one stage, indexed by history node (tree order) or AIS element.
struct StageTable {
    std::vector<std::string> keys;
    std::vector<double> value;
    std::vector<double> q;            // [x * nA + a]
    std::vector<std::size_t> greedy;  // lowest-index argmax over the allowed actions
};

struct ValueTables {
    std::size_t n_actions = 0;
    double discount = 1.0;
    bool stationary = false;
    std::vector<StageTable> stages; // stage t at index t - 1; one table when stationary

    const StageTable& stage(std::size_t t) const;
    std::size_t horizon() const { return stationary ? 0 : stages.size(); }
};

/// Actions whose Q is within tol of the maximum (among `allowed`, all if empty).
std::vector<std::size_t> argmax_set(const StageTable& st, std::size_t x, std::size_t n_actions,
                                    double tol = 1e-9, const std::vector<std::size_t>& allowed = {});

// ---------------------------------------------------------------------------
// History dynamic programs (discounted when model.discount < 1)

ValueTables history_policy_eval(const HistoryTree& tree, const HistoryPolicy& policy);
ValueTables history_policy_eval(const PomdpModel& model, const HistoryPolicy& policy, std::size_t horizon,
                                std::size_t history_cap = kDefaultHistoryCap);
ValueTables history_dp(const HistoryTree& tree);
ValueTables history_dp(const PomdpModel& model, std::size_t horizon,
                       std::size_t history_cap = kDefaultHistoryCap);

// ---------------------------------------------------------------------------
// AIS dynamic programs

/// Per stage, rows [z * nA + a] of action probabilities. One stage for
/// stationary policies.
struct AisPolicy {
    std::size_t n_actions = 0;
    std::vector<std::vector<double>> stages;
    const std::vector<double>& stage(std::size_t t) const;
};

/// Backward recursion over the generator for `horizon` stages. Stationary
/// generators reuse their single table. Q is reported for every action a
/// through the quantized action q(a); V maximizes over the allowed set.
ValueTables ais_dp(const AisGenerator& gen, std::size_t horizon);
ValueTables ais_policy_eval(const AisGenerator& gen, const AisPolicy& policy, std::size_t horizon);
AisPolicy greedy_policy(const ValueTables& tables);
/// Random rows supported on the allowed actions.
AisPolicy random_ais_policy(const AisGenerator& gen, std::size_t horizon, std::mt19937_64& rng);
/// pi(h) = sum_z compress(h)(z) pi_hat(z).
HistoryPolicy lift_policy(const AisGenerator& gen, const AisPolicy& policy);

/// Per stage t = 1..T: max over reachable h of |V_t(h) - E[V_hat_t(sigma(h))]|
/// and the same for Q at quantized actions.
struct ValueGap {
    std::vector<double> value;
    std::vector<double> q;
};
ValueGap value_gap(const HistoryTree& tree, const ValueTables& history_values, const AisGenerator& gen,
                   const ValueTables& ais_values);
/// Per stage max over reachable h of |V_t(h) - W_t(h)| for two history tables.
std::vector<double> history_gap(const ValueTables& a, const ValueTables& b);

// ---------------------------------------------------------------------------
// Error bounds

enum class BoundVariant { Primary, Alternative };
std::string to_string(BoundVariant v);
BoundVariant parse_bound_variant(const std::string& s);

struct BoundReport {
    IpmKind kind = IpmKind::TotalVariation;
    BoundVariant variant = BoundVariant::Primary;
    double discount = 1.0;
    bool stationary = false;
    std::vector<double> eps, delta, rho; // rho[t-1] = rho(V_{t+1})
    std::vector<double> alpha;           // alpha_t
    std::vector<double> policy_bound;    // 2 alpha_t
};

double minkowski_of_values(const AisSpace& space, const std::vector<double>& values, IpmKind kind);
/// rho(V_hat_{t+1}) over the stage-(t+1) space for t = 1..T (last entry 0).
/// Stationary tables give a single entry.
std::vector<double> minkowski_per_stage(const AisGenerator& gen, const ValueTables& vhat, IpmKind kind);
/// TV-class rho of the true values: Span(V_{t+1}) / 2 over reachable histories.
std::vector<double> history_minkowski_tv(const ValueTables& history_values);

/// alpha_t = eps_t + gamma (rho_t delta_t + alpha_{t+1}), alpha_{T+1} = 0.
BoundReport alpha_bounds(const AisCertificate& cert, const std::vector<double>& rho, double discount,
                         BoundVariant variant = BoundVariant::Primary);
BoundReport alpha_bounds(const AisCertificate& cert, const AisGenerator& gen, const ValueTables& vhat);

/// (eps + gamma rho delta) / (1 - gamma).
double stationary_alpha(double eps, double delta, double rho, double discount);
/// Uses the largest eps and delta of the certificate; one-entry report.
BoundReport stationary_bound(const AisCertificate& cert, double rho, double discount);

// ---------------------------------------------------------------------------
// Infinite horizon

struct Sandwich {
    double value = 0; // J_{t,T}
    double lower = 0;
    double upper = 0;
    bool contains(double v, double tol = 0) const { return v >= lower - tol && v <= upper + tol; }
};

/// [J + gamma^{T-t} R_min / (1-gamma), J + gamma^{T-t} R_max / (1-gamma)].
Sandwich make_sandwich(const PomdpModel& model, double J, std::size_t t, std::size_t T);

/// Finite-state controller: node-dependent action distribution and a
/// deterministic node update on (action, observation).
struct FiniteStateController {
    std::size_t n_nodes = 1;
    std::size_t n_actions = 0;
    std::size_t n_observations = 0;
    std::vector<double> action_prob;  // [n * nA + a]
    std::vector<std::size_t> next;    // [(n * nA + a) * nY + y]
    std::size_t initial = 0;

    std::size_t node_of(const History& h) const;
    HistoryPolicy as_history_policy() const;
};

FiniteStateController random_controller(std::size_t n_nodes, std::size_t n_actions,
                                        std::size_t n_observations, std::mt19937_64& rng);

/// J^pi_{t,T}(h) with t = h.stage(), evaluated on the product chain.
Sandwich truncated_eval_inf(const PomdpModel& model, const FiniteStateController& policy, const History& h,
                            std::size_t T);
/// Optimal J_{t,T}(b) for each belief, with t given; exact belief DP over T - t stages.
std::vector<Sandwich> truncated_optimal_inf(const PomdpModel& model, const std::vector<ProbVector>& beliefs,
                                            std::size_t t, std::size_t T);

struct ValueIterationResult {
    ValueTables tables; // one stationary stage
    double residual = 0;
    std::size_t iterations = 0;
    std::vector<std::vector<double>> iterates; // V^(0), V^(1), ... when requested
};

std::vector<double> bellman_operator(const AisGenerator& gen, const std::vector<double>& V);
ValueIterationResult ais_value_iteration(const AisGenerator& gen, double tol = 1e-8, bool keep_iterates = false,
                                         std::size_t max_iterations = 10'000'000);

struct ValueNormBounds {
    double span_bound = 0;  // Span(r) / (1 - gamma)
    double tv_bound = 0;    // half the span bound
    double bl_bound = 0;    // 2 ||r|| / (1 - gamma)
    std::optional<double> lipschitz_bound; // L_r / (1 - gamma L_p)
};

ValueNormBounds value_norm_bounds(double span_r, double sup_r, double discount,
                                  std::optional<std::pair<double, double>> lipschitz = std::nullopt);
ValueNormBounds value_norm_bounds(const PomdpModel& model,
                                  std::optional<std::pair<double, double>> lipschitz = std::nullopt);

// ---------------------------------------------------------------------------
// Literature comparisons

enum class Scenario { Abel, DeepMdp, FrancoisLavet, Lifelong };
std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

struct ScenarioParams {
    double eps = 0;
    double delta = 0;    // DeepMdp
    double discount = 0.9;
    std::size_t n_states = 0;
    std::size_t n_abstract = 0;
    double span_r = 1;
    double sup_r = 1;
    double L_r = 0, L_p = 0; // DeepMdp
    double lipschitz = 0;    // Lifelong: kernel Lipschitz constant
    double eta = 0;          // Lifelong: action-set diameter
    double zeta = 0;         // Lifelong: KL slack
};

struct Comparison {
    Scenario scenario;
    double ais_eps = 0, ais_delta = 0, ais_rho = 0; // ingredients fed to the generic bound
    double ais_bound = 0;
    double literature_bound = 0;
    double ratio = 0; // ais / literature
};

/// Evaluates the literature bound and the AIS bound obtained by plugging the
/// scenario's (eps, delta, rho) into the stationary alpha.
Comparison compare_bounds(Scenario scenario, const ScenarioParams& p);

} // namespace aisplan
