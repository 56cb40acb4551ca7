#pragma once

#include "aisplan/prob.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace aisplan {

inline constexpr std::size_t kDefaultHistoryCap = 8;

/// Finite POMDP. Observations are emitted after the transition and depend on
/// the new state and the action that led to it.
///
/// Storage is flat and row-major:
///   transition  [a][s][s']   P(s'|s,a)
///   observation [a][s'][y]   P(y|s',a)
///   reward      [s][a]       r(s,a)
struct PomdpModel {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::size_t n_observations = 0;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> reward;
    ProbVector initial_belief;
    double discount = 1.0;
    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;
    std::vector<std::string> observation_labels;

    double T(std::size_t a, std::size_t s, std::size_t s2) const {
        return transition[(a * n_states + s) * n_states + s2];
    }
    double O(std::size_t a, std::size_t s2, std::size_t y) const {
        return observation[(a * n_states + s2) * n_observations + y];
    }
    double R(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }

    double& T(std::size_t a, std::size_t s, std::size_t s2) {
        return transition[(a * n_states + s) * n_states + s2];
    }
    double& O(std::size_t a, std::size_t s2, std::size_t y) {
        return observation[(a * n_states + s2) * n_observations + y];
    }
    double& R(std::size_t s, std::size_t a) { return reward[s * n_actions + a]; }

    double reward_min() const;
    double reward_max() const;
    double reward_sup_norm() const;
    double reward_span() const { return reward_max() - reward_min(); }

    bool operator==(const PomdpModel&) const = default;
};

/// Allocates zeroed tables with a uniform initial belief.
PomdpModel make_empty_model(std::size_t n_states, std::size_t n_actions,
                            std::size_t n_observations, double discount);

/// Fully observed model: the observation is the new state.
PomdpModel make_mdp(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
                    std::vector<double> reward, double discount, ProbVector initial);

bool is_fully_observed(const PomdpModel& m);

/// Throws ModelError describing the first violated invariant.
void validate_model(const PomdpModel& m);

struct Step {
    std::size_t action;
    std::size_t observation;
    bool operator==(const Step&) const = default;
};

/// h_t = (y_{1:t-1}, a_{1:t-1}); step k holds a_k and the y_k that followed it.
struct History {
    std::vector<Step> steps;
    std::size_t stage() const { return steps.size() + 1; }
    bool operator==(const History&) const = default;
};

std::string to_string(const History& h);

std::vector<double> predict_state(const PomdpModel& m, const ProbVector& b, std::size_t a);
ProbVector obs_likelihood(const PomdpModel& m, const ProbVector& b, std::size_t a);
/// Bayes update; throws ImpossibleObservation if y has zero likelihood.
ProbVector belief_update(const PomdpModel& m, const ProbVector& b, std::size_t a, std::size_t y);
double expected_reward(const PomdpModel& m, const ProbVector& b, std::size_t a);
/// Folds belief_update over h from the initial belief.
ProbVector belief_of(const PomdpModel& m, const History& h);

using HistoryPolicy = std::function<ProbVector(const History&)>;

struct TrajectoryRecord {
    ProbVector belief;
    std::size_t state;
    std::size_t action;
    double reward;
    std::size_t next_state;
    std::size_t observation;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::uint64_t seed = 0;
    double discounted_return(double discount) const;
};

Trajectory simulate(const PomdpModel& m, const HistoryPolicy& policy, std::size_t horizon,
                    std::uint64_t seed);

} // namespace aisplan
