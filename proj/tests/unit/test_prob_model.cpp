#include "oracles.hpp"

#include "aisplan/error.hpp"
#include "aisplan/model.hpp"
#include "aisplan/random_models.hpp"

#include <doctest.h>

#include <cmath>

using namespace aisplan;

TEST_SUITE("prob") {
    TEST_CASE("ProbVector validates and clamps") {
        ProbVector p({0.25, 0.75});
        CHECK(p.size() == 2);
        CHECK(p[1] == doctest::Approx(0.75));
        ProbVector c({-1e-13, 1.0});
        CHECK(c[0] == 0.0);
        CHECK_THROWS_AS(ProbVector({0.5, 0.6}), ModelError);
        CHECK_THROWS_AS(ProbVector({-0.1, 1.1}), ModelError);
        CHECK_THROWS_AS(ProbVector({std::nan(""), 1.0}), ModelError);
    }

    TEST_CASE("uniform and point mass") {
        auto u = ProbVector::uniform(4);
        for (double v : u) CHECK(v == doctest::Approx(0.25));
        auto e = ProbVector::point_mass(3, 2);
        CHECK(e[2] == 1.0);
        CHECK(e[0] == 0.0);
    }

    TEST_CASE("sparse helpers round trip") {
        std::vector<double> d{0.0, 0.3, 0.0, 0.7};
        auto s = to_sparse(d);
        REQUIRE(s.size() == 2);
        CHECK(s[0].first == 1);
        CHECK(to_dense(s, 4) == d);
        SparseDist acc;
        accumulate(acc, s, 0.5);
        accumulate(acc, 0, 0.5);
        CHECK(acc.front().first == 0);
        CHECK(acc.front().second == doctest::Approx(0.5));
        CHECK(acc.back().second == doctest::Approx(0.35));
    }

    TEST_CASE("sample_index follows the weights") {
        std::mt19937_64 rng(3);
        std::vector<double> p{0.2, 0.5, 0.3};
        std::vector<int> cnt(3, 0);
        const int N = 200000;
        for (int i = 0; i < N; ++i) ++cnt[sample_index(rng, p)];
        for (int i = 0; i < 3; ++i) CHECK(cnt[i] / double(N) == doctest::Approx(p[i]).epsilon(0.02));
    }

    TEST_CASE("uniform01 stays in [0, 1)") {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 1000; ++i) {
            double u = uniform01(rng);
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }
}

namespace {

PomdpModel two_state() {
    PomdpModel m = make_empty_model(2, 2, 2, 0.9);
    // action 0 keeps the state, action 1 flips it
    m.T(0, 0, 0) = m.T(0, 1, 1) = 1;
    m.T(1, 0, 1) = m.T(1, 1, 0) = 1;
    for (std::size_t a = 0; a < 2; ++a) {
        m.O(a, 0, 0) = 0.8;
        m.O(a, 0, 1) = 0.2;
        m.O(a, 1, 0) = 0.3;
        m.O(a, 1, 1) = 0.7;
    }
    m.R(0, 0) = 1;
    m.R(1, 1) = 2;
    m.initial_belief = ProbVector({0.6, 0.4});
    return m;
}

} // namespace

TEST_SUITE("model") {
    TEST_CASE("validate_model catches broken tables") {
        PomdpModel m = two_state();
        CHECK_NOTHROW(validate_model(m));
        auto bad = m;
        bad.T(0, 0, 0) = 0.5;
        CHECK_THROWS_AS(validate_model(bad), ModelError);
        bad = m;
        bad.O(1, 1, 1) = 0.1;
        CHECK_THROWS_AS(validate_model(bad), ModelError);
        bad = m;
        bad.discount = 1.5;
        CHECK_THROWS_AS(validate_model(bad), ModelError);
        bad = m;
        bad.reward.pop_back();
        CHECK_THROWS_AS(validate_model(bad), ModelError);
    }

    TEST_CASE("belief update matches brute-force conditioning") {
        std::mt19937_64 rng(5);
        for (int inst = 0; inst < 30; ++inst) {
            PomdpModel m = random_pomdp(rng, 3, 2, 3);
            std::uniform_int_distribution<std::size_t> A(0, 1), Y(0, 2);
            History h;
            for (int k = 0; k < 4; ++k) {
                Step st{A(rng), Y(rng)};
                auto h2 = h;
                h2.steps.push_back(st);
                auto ref = oracle::brute_belief(m, h2.steps);
                if (ref.empty()) {
                    CHECK_THROWS_AS(belief_of(m, h2), ImpossibleObservation);
                    break;
                }
                auto b = belief_of(m, h2);
                for (std::size_t s = 0; s < 3; ++s) CHECK(b[s] == doctest::Approx(ref[s]).epsilon(1e-12));
                h = h2;
            }
        }
    }

    TEST_CASE("observation likelihood and expected reward") {
        PomdpModel m = two_state();
        auto psi = obs_likelihood(m, m.initial_belief, 1);
        // after the flip the state is 1 w.p. 0.6
        CHECK(psi[0] == doctest::Approx(0.4 * 0.8 + 0.6 * 0.3));
        CHECK(expected_reward(m, m.initial_belief, 1) == doctest::Approx(0.8));
        CHECK(m.reward_span() == 2);
        CHECK(m.reward_sup_norm() == 2);
    }

    TEST_CASE("impossible observation throws") {
        PomdpModel m = make_empty_model(1, 1, 2, 1.0);
        m.T(0, 0, 0) = 1;
        m.O(0, 0, 0) = 1;
        m.initial_belief = ProbVector({1.0});
        CHECK_THROWS_AS(belief_update(m, m.initial_belief, 0, 1), ImpossibleObservation);
    }

    TEST_CASE("history string form") {
        History h;
        CHECK(h.stage() == 1);
        h.steps.push_back({1, 0});
        h.steps.push_back({0, 1});
        CHECK(h.stage() == 3);
        CHECK(to_string(h) == "a1y0 a0y1");
    }

    TEST_CASE("simulate is deterministic given the seed") {
        PomdpModel m = two_state();
        HistoryPolicy pol = [](const History&) { return ProbVector({0.5, 0.5}); };
        auto a = simulate(m, pol, 20, 42);
        auto b = simulate(m, pol, 20, 42);
        REQUIRE(a.records.size() == 20);
        for (std::size_t i = 0; i < 20; ++i) {
            CHECK(a.records[i].action == b.records[i].action);
            CHECK(a.records[i].observation == b.records[i].observation);
        }
        double g = 0, w = 1;
        for (auto& r : a.records) {
            g += w * r.reward;
            w *= 0.9;
        }
        CHECK(a.discounted_return(0.9) == doctest::Approx(g));
    }

    TEST_CASE("simulated beliefs agree with the filter") {
        PomdpModel m = two_state();
        HistoryPolicy pol = [](const History& h) { return ProbVector::point_mass(2, h.steps.size() % 2); };
        auto tr = simulate(m, pol, 6, 9);
        History h;
        for (auto& r : tr.records) {
            auto b = belief_of(m, h);
            CHECK(r.belief[0] == doctest::Approx(b[0]));
            h.steps.push_back({r.action, r.observation});
        }
    }

    TEST_CASE("make_mdp is fully observed") {
        std::mt19937_64 rng(2);
        PomdpModel m = random_mdp(rng, 3, 2);
        CHECK(is_fully_observed(m));
        CHECK_FALSE(is_fully_observed(two_state()));
    }
}
