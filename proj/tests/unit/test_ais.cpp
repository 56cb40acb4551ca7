#include "oracles.hpp"

#include "aisplan/ais.hpp"
#include "aisplan/envs.hpp"
#include "aisplan/error.hpp"
#include "aisplan/random_models.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace aisplan;

TEST_SUITE("lattice") {
    TEST_CASE("nearest lattice point matches exhaustive search") {
        std::mt19937_64 rng(21);
        for (std::size_t m : {2, 3, 4})
            for (int n : {1, 2, 3, 5, 7}) {
                for (int k = 0; k < 40; ++k) {
                    auto b = random_distribution(rng, m);
                    auto ref = oracle::brute_lattice(b, n);
                    auto got = lattice_quantize(ProbVector(b), n);
                    double dg = 0, dr = 0;
                    for (std::size_t i = 0; i < m; ++i) {
                        dg += std::abs(got[i] - b[i]);
                        dr += std::abs(ref[i] - b[i]);
                    }
                    CHECK(dg == doctest::Approx(dr).epsilon(1e-12));
                    for (std::size_t i = 0; i < m; ++i) CHECK(got[i] * n == doctest::Approx(std::round(got[i] * n)));
                }
            }
    }

    TEST_CASE("ties resolve to the lexicographically smallest point") {
        // (0.5, 0.5) with n = 1 is equidistant from (1, 0) and (0, 1).
        auto q = lattice_quantize(ProbVector({0.5, 0.5}), 1);
        CHECK(q[0] == 0.0);
        CHECK(q[1] == 1.0);
        auto r = oracle::brute_lattice({0.5, 0.5}, 1);
        CHECK(r[0] == 0.0);
    }

    TEST_CASE("lattice sizes and enumeration") {
        CHECK(lattice_size(2, 20) == 21);
        CHECK(lattice_size(3, 4) == 15);
        CHECK(enumerate_lattice(3, 4).size() == oracle::compositions(3, 4).size());
        CHECK(enumerate_lattice(4, 3).size() == lattice_size(4, 3));
    }

    TEST_CASE("quantization error bound holds and is tight for two points") {
        std::mt19937_64 rng(22);
        for (std::size_t m : {2, 3, 5})
            for (std::size_t n : {2, 4, 9}) {
                const double bound = lattice_l1_error_bound(m, n);
                CHECK(bound == doctest::Approx(2.0 * (m / 2) * ((m + 1) / 2) / double(m * n)));
                for (int k = 0; k < 200; ++k) {
                    auto b = random_distribution(rng, m);
                    auto q = lattice_quantize(ProbVector(b), n);
                    double d = 0;
                    for (std::size_t i = 0; i < m; ++i) d += std::abs(q[i] - b[i]);
                    CHECK(d <= bound + 1e-12);
                }
            }
        // worst case on the segment: halfway between two lattice points
        const std::size_t n = 4;
        auto q = lattice_quantize(ProbVector({0.125, 0.875}), n);
        CHECK(std::abs(q[0] - 0.125) + std::abs(q[1] - 0.875) == doctest::Approx(lattice_l1_error_bound(2, n)));
    }

    TEST_CASE("n = 0 is rejected") { CHECK_THROWS_AS(lattice_quantize(ProbVector({1.0}), 0), ModelError); }
}

namespace {

/// Independent (eps, delta-under-TV) measurement for a deterministic compression.
std::pair<std::vector<double>, std::vector<double>> measure_by_hand(const PomdpModel& m, const AisGenerator& gen,
                                                                    std::size_t T) {
    std::vector<double> eps(T, 0.0), delta(T, 0.0);
    std::function<void(std::vector<Step>&)> rec = [&](std::vector<Step>& h) {
        const std::size_t t = h.size() + 1;
        auto b = oracle::brute_belief(m, h);
        History H{h};
        auto c = gen.compress(H);
        REQUIRE(c.size() == 1);
        const std::size_t z = c[0].first;
        const auto& st = gen.stage(t);
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            double r = 0;
            for (std::size_t s = 0; s < m.n_states; ++s) r += b[s] * m.R(s, a);
            eps[t - 1] = std::max(eps[t - 1], std::abs(r - st.reward[z * m.n_actions + a]));
            if (t == T) continue;
            std::map<std::size_t, double> pz;
            for (std::size_t y = 0; y < m.n_observations; ++y) {
                double py = 0;
                for (std::size_t s = 0; s < m.n_states; ++s)
                    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) py += b[s] * m.T(a, s, s2) * m.O(a, s2, y);
                if (py <= 1e-15) continue;
                h.push_back({a, y});
                auto cn = gen.compress(History{h});
                pz[cn[0].first] += py;
                rec(h);
                h.pop_back();
            }
            for (auto [zz, p] : st.kernel[z * m.n_actions + a]) pz[zz] -= p;
            double tv = 0;
            for (auto [zz, d] : pz) tv += std::abs(d);
            delta[t - 1] = std::max(delta[t - 1], tv);
        }
    };
    std::vector<Step> h;
    rec(h);
    return {eps, delta};
}

} // namespace

TEST_SUITE("ais") {
    TEST_CASE("belief quantization generators validate") {
        std::mt19937_64 rng(31);
        for (int k = 0; k < 10; ++k) {
            PomdpModel m = random_pomdp(rng, 3, 2, 2);
            for (std::size_t n : {0, 3, 8})
                for (auto kernel : {BeliefKernel::ExactUpdate, BeliefKernel::QuantizedUpdate}) {
                    BeliefQuantOptions opt;
                    opt.kernel = kernel;
                    AisGenerator g = build_belief_quant_ais(m, 3, n, IpmKind::BoundedLipschitz, opt);
                    CHECK_NOTHROW(validate_generator(g));
                    CHECK(g.horizon() == 3);
                }
        }
    }

    TEST_CASE("measurement matches an independent computation") {
        std::mt19937_64 rng(32);
        for (int k = 0; k < 15; ++k) {
            PomdpModel m = random_pomdp(rng, 3, 2, 2);
            for (auto kernel : {BeliefKernel::ExactUpdate, BeliefKernel::QuantizedUpdate}) {
                BeliefQuantOptions opt;
                opt.kernel = kernel;
                AisGenerator g = build_belief_quant_ais(m, 3, 4, IpmKind::TotalVariation, opt);
                AisCertificate c = measure_ais(m, g, 3, IpmKind::TotalVariation);
                auto [eps, delta] = measure_by_hand(m, g, 3);
                for (std::size_t t = 0; t < 3; ++t) {
                    CHECK(c.eps[t] == doctest::Approx(eps[t]).epsilon(1e-9));
                    CHECK(c.delta[t] == doctest::Approx(delta[t]).epsilon(1e-9));
                }
                CHECK(c.delta[2] == 0.0);
            }
        }
    }

    TEST_CASE("exact belief is an information state") {
        for (const EnvSpec& env : {tiger(), voicemail()}) {
            AisGenerator g = build_belief_quant_ais(env.model, 3, 0);
            auto rep = verify_information_state(env.model, g, 3);
            CHECK(rep.holds);
            CHECK(rep.reward_violation <= 1e-9);
            REQUIRE(rep.p2a.has_value());
            CHECK(*rep.p2a);
            CHECK(*rep.p2b);
        }
    }

    TEST_CASE("history indices are an information state; a constant is not") {
        PomdpModel m = tiger().model;
        CHECK(verify_information_state(m, history_index_compression(m, 3), 3).holds);
        CompressFn constant = [](const History&) { return SparseDist{{0, 1.0}}; };
        auto rep = verify_information_state(m, constant, 3);
        CHECK_FALSE(rep.holds);
        CHECK(rep.reward_violation > 0);
    }

    TEST_CASE("declared certificates cover the measured ones") {
        for (const EnvSpec& env : {tiger(), voicemail()})
            for (std::size_t n : {4, 10})
                for (auto kernel : {BeliefKernel::ExactUpdate, BeliefKernel::QuantizedUpdate}) {
                    BeliefQuantOptions opt;
                    opt.kernel = kernel;
                    AisGenerator g = build_belief_quant_ais(env.model, 4, n, IpmKind::BoundedLipschitz, opt);
                    REQUIRE(g.declared.has_value());
                    const double e1 = lattice_l1_error_bound(env.model.n_states, n);
                    const double factor = kernel == BeliefKernel::ExactUpdate ? 3 : 4;
                    CHECK(g.declared->eps[0] == doctest::Approx(env.model.reward_sup_norm() * e1));
                    CHECK(g.declared->delta[0] == doctest::Approx(factor * e1));
                    AisCertificate c = measure_ais(env.model, g, 4, IpmKind::BoundedLipschitz);
                    for (std::size_t t = 0; t < 4; ++t) {
                        CHECK(c.eps[t] <= g.declared->eps[t] + 1e-9);
                        CHECK(c.delta[t] <= g.declared->delta[t] + 1e-9);
                    }
                }
    }

    TEST_CASE("constant generator error is the reward spread") {
        PomdpModel m = tiger().model;
        std::vector<double> r(3);
        for (std::size_t a = 0; a < 3; ++a) r[a] = expected_reward(m, m.initial_belief, a);
        AisGenerator g = constant_generator(m, 2, r);
        AisCertificate c = measure_ais(m, g, 2, IpmKind::TotalVariation);
        CHECK(c.eps[0] == doctest::Approx(0.0));
        CHECK(c.delta[0] == doctest::Approx(0.0)); // one point, nothing to mispredict
        // After listening once with accuracy p the belief on a side is p.
        const double p = env_constants::kTigerListenAccuracy;
        CHECK(c.eps[1] == doctest::Approx(std::abs((p * -100 + (1 - p) * 10) - (0.5 * -100 + 0.5 * 10))));
    }

    TEST_CASE("MDP generator is exact and stationary") {
        std::mt19937_64 rng(33);
        PomdpModel m = random_mdp(rng, 4, 2);
        AisGenerator g = mdp_generator(m);
        CHECK(g.stationary);
        CHECK_NOTHROW(validate_generator(g));
        AisCertificate c = measure_ais(m, g, 3, IpmKind::TotalVariation);
        CHECK(c.max_eps() <= 1e-12);
        CHECK(c.max_delta() <= 1e-12);
    }

    TEST_CASE("state aggregation: measured within declared") {
        std::mt19937_64 rng(34);
        for (int k = 0; k < 20; ++k) {
            PomdpModel m = random_mdp(rng, 4, 2);
            AggregationSpec spec{{0, 0, 1, 1}, {0.5, 0.5, 0.3, 0.7}};
            auto res = build_aggregated_mdp(m, spec);
            CHECK_NOTHROW(validate_model(res.model));
            CHECK(res.measured.eps[0] <= res.declared.eps[0] + 1e-12);
            CHECK(res.measured.delta[0] <= res.declared.delta[0] + 1e-12);
        }
        std::mt19937_64 r2(1);
        PomdpModel m = random_mdp(r2, 3, 2);
        CHECK_THROWS_AS(build_aggregated_mdp(m, AggregationSpec{{0, 0, 1}, {0.5, 0.4, 1}}), ModelError);
    }

    TEST_CASE("action quantizer certificate by hand") {
        PomdpModel m = make_empty_model(2, 3, 2, 0.9);
        auto set = [&](std::size_t a, double p) {
            for (std::size_t s = 0; s < 2; ++s) {
                m.T(a, s, 0) = p;
                m.T(a, s, 1) = 1 - p;
            }
        };
        set(0, 0.9);
        set(1, 0.4);
        set(2, 0.45);
        for (std::size_t s = 0; s < 2; ++s) {
            m.R(s, 0) = 1;
            m.R(s, 1) = 0.5;
            m.R(s, 2) = 0.52;
            for (std::size_t a = 0; a < 3; ++a) m.O(a, s, s) = 1;
        }
        AisCertificate c = certify_action_quantizer(m, {0, 1}, {0, 1, 1}, IpmKind::TotalVariation);
        CHECK(c.eps[0] == doctest::Approx(0.02));
        CHECK(c.delta[0] == doctest::Approx(0.1));
        AisGenerator g = action_quantized_generator(m, {0, 1}, {0, 1, 1});
        CHECK(g.allowed_actions() == std::vector<std::size_t>{0, 1});
        CHECK(g.quantize_action(2) == 1);
        CHECK_FALSE(g.allows(2));
    }

    TEST_CASE("latent certificate and Lipschitz constants") {
        // Two states mapped to two points on a line; kernel copies the true push-forward.
        PomdpModel m = make_empty_model(2, 1, 2, 0.5);
        m.T(0, 0, 0) = 0.3;
        m.T(0, 0, 1) = 0.7;
        m.T(0, 1, 0) = 0.6;
        m.T(0, 1, 1) = 0.4;
        m.O(0, 0, 0) = m.O(0, 1, 1) = 1;
        m.R(0, 0) = 1;
        m.R(1, 0) = 3;
        LatentModel lat{{{0.0}, {2.0}}, {0, 1}, {{0.3, 0.7}, {0.6, 0.4}}, {1, 3}};
        auto cert = certify_latent_space(m, lat, 1.0, 0.15);
        CHECK(cert.certificate.eps[0] == doctest::Approx(0.0));
        CHECK(cert.certificate.delta[0] == doctest::Approx(0.0));
        REQUIRE(cert.lipschitz_value_bound.has_value());
        CHECK(*cert.lipschitz_value_bound == doctest::Approx(1.0 / (1 - 0.5 * 0.15)));
        auto [Lr, Lp] = latent_lipschitz_constants(lat, 1);
        CHECK(Lr == doctest::Approx(1.0));
        CHECK(Lp == doctest::Approx(0.3 * 2 / 2));
    }

    TEST_CASE("observation compression wraps a generator") {
        std::mt19937_64 rng(35);
        PomdpModel m = random_pomdp(rng, 2, 2, 3);
        std::vector<std::size_t> q{0, 1, 1};
        PomdpModel mc = compress_observations(m, q);
        CHECK(mc.n_observations == 2);
        CHECK_NOTHROW(validate_model(mc));
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t s = 0; s < 2; ++s) CHECK(mc.O(a, s, 1) == doctest::Approx(m.O(a, s, 1) + m.O(a, s, 2)));
        AisGenerator g = with_observation_map(build_belief_quant_ais(mc, 3, 0), q, 3);
        History h{{{0, 2}}};
        auto direct = build_belief_quant_ais(mc, 3, 0).compress(History{{{0, 1}}});
        CHECK(g.compress(h) == direct);
    }

    TEST_CASE("stochastic wrapper keeps point masses") {
        AisGenerator g = as_stochastic(build_belief_quant_ais(tiger().model, 2, 5));
        CHECK(g.stochastic);
        auto c = g.compress(History{});
        REQUIRE(c.size() == 1);
        CHECK(c[0].second == 1.0);
    }

    TEST_CASE("stationary generator closes under the quantized update") {
        AisGenerator g = build_belief_quant_ais(tiger().model, 0, 6);
        CHECK(g.stationary);
        CHECK_NOTHROW(validate_generator(g));
        const auto& st = g.stage(1);
        for (const auto& row : st.kernel)
            for (auto [z, p] : row) CHECK(z < st.space.size);
        // every listed point is on the lattice
        for (const auto& pt : st.space.points)
            for (double v : pt) CHECK(v * 6 == doctest::Approx(std::round(v * 6)));
    }
}
