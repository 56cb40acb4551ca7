#pragma once

#include "aisplan/model.hpp"

#include <random>

namespace aisplan {

/// Random distribution with uniform(0,1) weights; each entry is zeroed with
/// probability `sparsity` (at least one entry survives).
std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, double sparsity = 0.0);

struct RandomModelOptions {
    double discount = 1.0;
    double reward_low = -1.0;
    double reward_high = 1.0;
    double sparsity = 0.0;
    bool random_initial = true;
};

PomdpModel random_pomdp(std::mt19937_64& rng, std::size_t n_states, std::size_t n_actions,
                        std::size_t n_observations, const RandomModelOptions& opt = {});
PomdpModel random_mdp(std::mt19937_64& rng, std::size_t n_states, std::size_t n_actions,
                      const RandomModelOptions& opt = {});

} // namespace aisplan
