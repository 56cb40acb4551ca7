#include "aisplan/random_models.hpp"

namespace aisplan {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, double sparsity) {
    std::vector<double> v(n);
    double s = 0;
    for (auto& x : v) {
        x = uniform01(rng) < sparsity ? 0.0 : uniform01(rng) + 1e-3;
        s += x;
    }
    if (s == 0) {
        v[rng() % n] = 1.0;
        return v;
    }
    for (auto& x : v) x /= s;
    return v;
}

PomdpModel random_pomdp(std::mt19937_64& rng, std::size_t nS, std::size_t nA, std::size_t nY,
                        const RandomModelOptions& opt) {
    PomdpModel m = make_empty_model(nS, nA, nY, opt.discount);
    for (std::size_t a = 0; a < nA; ++a)
        for (std::size_t s = 0; s < nS; ++s) {
            auto row = random_distribution(rng, nS, opt.sparsity);
            for (std::size_t s2 = 0; s2 < nS; ++s2) m.T(a, s, s2) = row[s2];
        }
    for (std::size_t a = 0; a < nA; ++a)
        for (std::size_t s = 0; s < nS; ++s) {
            auto row = random_distribution(rng, nY, opt.sparsity);
            for (std::size_t y = 0; y < nY; ++y) m.O(a, s, y) = row[y];
        }
    for (auto& r : m.reward) r = opt.reward_low + (opt.reward_high - opt.reward_low) * uniform01(rng);
    if (opt.random_initial) m.initial_belief = ProbVector(random_distribution(rng, nS));
    return m;
}

PomdpModel random_mdp(std::mt19937_64& rng, std::size_t nS, std::size_t nA,
                      const RandomModelOptions& opt) {
    std::vector<double> t(nA * nS * nS);
    for (std::size_t a = 0; a < nA; ++a)
        for (std::size_t s = 0; s < nS; ++s) {
            auto row = random_distribution(rng, nS, opt.sparsity);
            std::copy(row.begin(), row.end(), t.begin() + (a * nS + s) * nS);
        }
    std::vector<double> r(nS * nA);
    for (auto& x : r) x = opt.reward_low + (opt.reward_high - opt.reward_low) * uniform01(rng);
    ProbVector init = opt.random_initial ? ProbVector(random_distribution(rng, nS))
                                         : ProbVector::point_mass(nS, 0);
    return make_mdp(nS, nA, std::move(t), std::move(r), opt.discount, std::move(init));
}

} // namespace aisplan
