#include "oracles.hpp"

#include "aisplan/envs.hpp"
#include "aisplan/error.hpp"
#include "aisplan/planning.hpp"
#include "aisplan/random_models.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace aisplan;

namespace {

/// Value of a history policy by direct recursion with brute-force conditioning.
double brute_policy_value(const PomdpModel& m, const HistoryPolicy& pol, std::vector<Step>& h, std::size_t left) {
    if (left == 0) return 0;
    auto b = oracle::brute_belief(m, h);
    ProbVector pa = pol(History{h});
    double v = 0;
    for (std::size_t a = 0; a < m.n_actions; ++a) {
        if (pa[a] == 0) continue;
        double q = 0;
        for (std::size_t s = 0; s < m.n_states; ++s) q += b[s] * m.R(s, a);
        if (left > 1)
            for (std::size_t y = 0; y < m.n_observations; ++y) {
                double py = 0;
                for (std::size_t s = 0; s < m.n_states; ++s)
                    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) py += b[s] * m.T(a, s, s2) * m.O(a, s2, y);
                if (py <= 1e-15) continue;
                h.push_back({a, y});
                q += m.discount * py * brute_policy_value(m, pol, h, left - 1);
                h.pop_back();
            }
        v += pa[a] * q;
    }
    return v;
}

} // namespace

TEST_SUITE("planning") {
    TEST_CASE("history DP matches plain recursion") {
        std::mt19937_64 rng(41);
        for (int k = 0; k < 20; ++k) {
            RandomModelOptions opt;
            opt.discount = k % 2 ? 0.9 : 1.0;
            PomdpModel m = random_pomdp(rng, 3, 2, 2, opt);
            HistoryTree tree(m, 3);
            ValueTables v = history_dp(tree);
            CHECK(v.stage(1).value[0] == doctest::Approx(oracle::brute_value(m, {}, 3)).epsilon(1e-12));
            for (std::size_t i = 0; i < tree.stage(2).size(); ++i) {
                auto h = tree.history(2, i);
                CHECK(v.stage(2).value[i] == doctest::Approx(oracle::brute_value(m, h.steps, 2)).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("history policy evaluation matches plain recursion") {
        std::mt19937_64 rng(42);
        for (int k = 0; k < 10; ++k) {
            PomdpModel m = random_pomdp(rng, 2, 3, 2);
            FiniteStateController c = random_controller(2, 3, 2, rng);
            HistoryPolicy pol = c.as_history_policy();
            ValueTables v = history_policy_eval(m, pol, 4);
            std::vector<Step> h;
            CHECK(v.stage(1).value[0] == doctest::Approx(brute_policy_value(m, pol, h, 4)).epsilon(1e-12));
        }
    }

    TEST_CASE("exact belief AIS reproduces history values") {
        PomdpModel m = voicemail().model;
        HistoryTree tree(m, 3);
        ValueTables hv = history_dp(tree);
        AisGenerator g = build_belief_quant_ais(m, 3, 0);
        ValueTables av = ais_dp(g, 3);
        ValueGap gap = value_gap(tree, hv, g, av);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(gap.value[t] <= 1e-9);
            CHECK(gap.q[t] <= 1e-9);
        }
        auto pv = history_policy_eval(tree, lift_policy(g, greedy_policy(av)));
        for (double d : history_gap(hv, pv)) CHECK(d <= 1e-9);
    }

    TEST_CASE("greedy ties go to the lowest action index") {
        PomdpModel m = make_empty_model(1, 3, 1, 1.0);
        for (std::size_t a = 0; a < 3; ++a) {
            m.T(a, 0, 0) = 1;
            m.O(a, 0, 0) = 1;
            m.R(0, a) = a == 0 ? 0.5 : 1.0;
        }
        m.initial_belief = ProbVector({1.0});
        ValueTables v = history_dp(m, 2);
        CHECK(v.stage(1).greedy[0] == 1);
        auto set = argmax_set(v.stage(1), 0, 3);
        CHECK(set == std::vector<std::size_t>{1, 2});
        CHECK(argmax_set(v.stage(1), 0, 3, 1e-9, {0, 2}) == std::vector<std::size_t>{2});
    }

    TEST_CASE("AIS DP rejects short generators and bad policies") {
        PomdpModel m = tiger().model;
        AisGenerator g = build_belief_quant_ais(m, 2, 4);
        CHECK_THROWS_AS(ais_dp(g, 3), ModelError);
        CHECK_THROWS_AS(ais_dp(g, 0), ModelError);
        ValueTables v = ais_dp(g, 2);
        AisPolicy p = greedy_policy(v);
        p.stages[0][0] = 0.3; // row no longer sums to one
        CHECK_THROWS_AS(ais_policy_eval(g, p, 2), ModelError);
    }

    TEST_CASE("random AIS policies are distributions on allowed actions") {
        std::mt19937_64 rng(43);
        std::mt19937_64 mr(1);
        PomdpModel mdp = random_mdp(mr, 3, 3);
        AisGenerator g = action_quantized_generator(mdp, {0, 2}, {0, 0, 2});
        AisPolicy p = random_ais_policy(g, 4, rng);
        REQUIRE(p.stages.size() == 1); // stationary generator
        for (std::size_t z = 0; z < 3; ++z) {
            CHECK(p.stages[0][z * 3 + 1] == 0.0);
            CHECK(p.stages[0][z * 3] + p.stages[0][z * 3 + 2] == doctest::Approx(1.0));
        }
    }

    TEST_CASE("lifted policies mix over stochastic compressions") {
        std::mt19937_64 mr(2);
        PomdpModel mdp = random_mdp(mr, 2, 2);
        mdp.initial_belief = ProbVector({0.25, 0.75});
        AisGenerator g = mdp_generator(mdp);
        AisPolicy p;
        p.n_actions = 2;
        p.stages = {{1, 0, 0, 1}}; // state 0 -> action 0, state 1 -> action 1
        auto pi = lift_policy(g, p)(History{});
        CHECK(pi[0] == doctest::Approx(0.25));
        History h{{{0, 1}}};
        CHECK(lift_policy(g, p)(h)[1] == doctest::Approx(1.0));
    }

    TEST_CASE("value table keys follow the history string form") {
        ValueTables v = history_dp(tiger().model, 2);
        CHECK(v.stage(1).keys[0].empty());
        CHECK(v.stage(2).keys.size() == 6);
        CHECK(v.stage(2).keys[0] == "a0y0");
        CHECK_THROWS_AS(v.stage(3), ModelError);
    }
}

TEST_SUITE("bounds") {
    TEST_CASE("alpha recursion by hand") {
        AisCertificate c;
        c.eps = {1, 2, 3};
        c.delta = {0.5, 0.5, 0};
        BoundReport r = alpha_bounds(c, {2, 1, 0}, 0.5);
        CHECK(r.alpha[2] == doctest::Approx(3));
        CHECK(r.alpha[1] == doctest::Approx(2 + 0.5 * (1 * 0.5 + 3)));
        CHECK(r.alpha[0] == doctest::Approx(1 + 0.5 * (2 * 0.5 + r.alpha[1])));
        for (std::size_t t = 0; t < 3; ++t) CHECK(r.policy_bound[t] == doctest::Approx(2 * r.alpha[t]));
        CHECK_THROWS_AS(alpha_bounds(c, {1, 0}, 0.5), ModelError);
        AisCertificate zero;
        zero.eps = {0, 0};
        zero.delta = {0, 0};
        for (double a : alpha_bounds(zero, {3, 0}, 1.0).alpha) CHECK(a == 0.0);
    }

    TEST_CASE("variant names") {
        CHECK(parse_bound_variant("primary") == BoundVariant::Primary);
        CHECK(parse_bound_variant("alt") == BoundVariant::Alternative);
        CHECK(to_string(BoundVariant::Alternative) == "alt");
        CHECK_THROWS_AS(parse_bound_variant("other"), ModelError);
    }

    TEST_CASE("stationary alpha") {
        CHECK(stationary_alpha(1, 0.5, 2, 0.9) == doctest::Approx((1 + 0.9 * 2 * 0.5) / 0.1));
        AisCertificate c;
        c.eps = {0.1, 0.3};
        c.delta = {0.2, 0.05};
        BoundReport r = stationary_bound(c, 1.5, 0.8);
        REQUIRE(r.alpha.size() == 1);
        CHECK(r.alpha[0] == doctest::Approx((0.3 + 0.8 * 1.5 * 0.2) / 0.2));
        CHECK(r.stationary);
    }

    TEST_CASE("TV Minkowski of value tables is half the span") {
        AisSpace sp;
        sp.size = 3;
        CHECK(minkowski_of_values(sp, {1, 5, 2}, IpmKind::TotalVariation) == doctest::Approx(2));
        AisGenerator g = build_belief_quant_ais(tiger().model, 3, 5);
        ValueTables v = ais_dp(g, 3);
        auto rho = minkowski_per_stage(g, v, IpmKind::TotalVariation);
        REQUIRE(rho.size() == 3);
        CHECK(rho[0] == doctest::Approx(span(v.stage(2).value) / 2));
        CHECK(rho[2] == 0.0);
    }

    TEST_CASE("sandwich endpoints") {
        PomdpModel m = tiger().model;
        Sandwich s = make_sandwich(m, 3.0, 2, 5);
        const double w = std::pow(0.95, 3) / 0.05;
        CHECK(s.lower == doctest::Approx(3 + w * -100));
        CHECK(s.upper == doctest::Approx(3 + w * 10));
        CHECK(s.contains(3.0));
        CHECK_THROWS_AS(make_sandwich(m, 0, 6, 5), ModelError);
        PomdpModel u = m;
        u.discount = 1.0;
        CHECK_THROWS_AS(make_sandwich(u, 0, 1, 5), Unsupported);
    }

    TEST_CASE("truncated controller value on a constant-reward chain") {
        PomdpModel m = make_empty_model(1, 1, 1, 0.9);
        m.T(0, 0, 0) = 1;
        m.O(0, 0, 0) = 1;
        m.R(0, 0) = 2;
        m.initial_belief = ProbVector({1.0});
        std::mt19937_64 rng(4);
        auto c = random_controller(1, 1, 1, rng);
        Sandwich s = truncated_eval_inf(m, c, History{}, 11);
        CHECK(s.value == doctest::Approx(2 * (1 - std::pow(0.9, 10)) / 0.1));
        CHECK(s.lower == doctest::Approx(20));
        CHECK(s.upper == doctest::Approx(20));
    }

    TEST_CASE("truncated controller value matches policy evaluation") {
        std::mt19937_64 rng(44);
        for (int k = 0; k < 10; ++k) {
            RandomModelOptions opt;
            opt.discount = 0.8;
            PomdpModel m = random_pomdp(rng, 3, 2, 2, opt);
            auto c = random_controller(3, 2, 2, rng);
            Sandwich s = truncated_eval_inf(m, c, History{}, 5);
            ValueTables v = history_policy_eval(m, c.as_history_policy(), 4);
            CHECK(s.value == doctest::Approx(v.stage(1).value[0]).epsilon(1e-12));
        }
    }

    TEST_CASE("truncated optimal value matches plain recursion") {
        PomdpModel m = tiger().model;
        HistoryTree tree(m, 2);
        std::vector<ProbVector> beliefs;
        for (auto& n : tree.stage(2)) beliefs.push_back(n.belief);
        auto sw = truncated_optimal_inf(m, beliefs, 2, 5);
        for (std::size_t i = 0; i < beliefs.size(); ++i)
            CHECK(sw[i].value == doctest::Approx(oracle::brute_value(m, tree.history(2, i).steps, 3)).epsilon(1e-12));
        auto last = truncated_optimal_inf(m, beliefs, 5, 5);
        CHECK(last[0].value == 0.0);
    }

    TEST_CASE("value iteration reaches a fixed point") {
        AisGenerator g = build_belief_quant_ais(tiger().model, 0, 8);
        ValueIterationResult vi = ais_value_iteration(g, 1e-9, true);
        CHECK(vi.residual <= 1e-9);
        CHECK(vi.iterates.size() == vi.iterations + 1);
        auto TV = bellman_operator(g, vi.tables.stages[0].value);
        double err = 0;
        for (std::size_t i = 0; i < TV.size(); ++i) err = std::max(err, std::abs(TV[i] - vi.tables.stages[0].value[i]));
        CHECK(err <= 1e-9);
        CHECK(vi.tables.stationary);
        // contraction: successive differences shrink by at least gamma
        for (std::size_t k = 2; k < std::min<std::size_t>(vi.iterates.size(), 20); ++k) {
            double d1 = 0, d0 = 0;
            for (std::size_t i = 0; i < TV.size(); ++i) {
                d1 = std::max(d1, std::abs(vi.iterates[k][i] - vi.iterates[k - 1][i]));
                d0 = std::max(d0, std::abs(vi.iterates[k - 1][i] - vi.iterates[k - 2][i]));
            }
            CHECK(d1 <= 0.95 * d0 + 1e-12);
        }
    }

    TEST_CASE("value iteration needs discount below one") {
        PomdpModel m = tiger().model;
        m.discount = 1.0;
        AisGenerator g = build_belief_quant_ais(m, 0, 4);
        CHECK_THROWS(ais_value_iteration(g));
    }

    TEST_CASE("value norm bounds") {
        auto b = value_norm_bounds(2.0, 3.0, 0.9, std::make_pair(1.0, 1.05));
        CHECK(b.span_bound == doctest::Approx(20));
        CHECK(b.tv_bound == doctest::Approx(10));
        CHECK(b.bl_bound == doctest::Approx(60));
        REQUIRE(b.lipschitz_bound.has_value());
        CHECK(*b.lipschitz_bound == doctest::Approx(1.0 / (1 - 0.9 * 1.05)));
        auto nb = value_norm_bounds(tiger().model);
        CHECK(nb.span_bound == doctest::Approx(110 / 0.05));
        CHECK_FALSE(nb.lipschitz_bound.has_value());
    }

    TEST_CASE("literature comparisons") {
        ScenarioParams p;
        p.eps = 0.05;
        p.discount = 0.8;
        p.n_states = 6;
        p.n_abstract = 3;
        p.span_r = 2;
        p.sup_r = 1.5;
        Comparison a = compare_bounds(Scenario::Abel, p);
        CHECK(a.literature_bound ==
              doctest::Approx(2 * 0.05 / 0.04 + 2 * 0.8 * 0.05 * 6 * 1.5 / std::pow(0.2, 3)));
        CHECK(a.ais_delta == doctest::Approx(0.05 * 3));
        CHECK(a.ais_rho == doctest::Approx(2 / (2 * 0.2)));
        CHECK(a.ratio == doctest::Approx(a.ais_bound / a.literature_bound));

        Comparison f = compare_bounds(Scenario::FrancoisLavet, p);
        CHECK(f.literature_bound == doctest::Approx(2 * 0.05 * 1.5 / std::pow(0.2, 3)));
        CHECK(f.ais_bound < f.literature_bound);

        ScenarioParams d = p;
        d.delta = 0.1;
        d.L_r = 2;
        d.L_p = 1.1;
        Comparison dm = compare_bounds(Scenario::DeepMdp, d);
        CHECK(dm.ais_rho == doctest::Approx(2 / (1 - 0.8 * 1.1)));
        CHECK(dm.ais_bound == doctest::Approx(dm.literature_bound).epsilon(1e-12));

        ScenarioParams l = p;
        l.lipschitz = 2;
        l.eta = 0.1;
        l.zeta = 0.01;
        Comparison lf = compare_bounds(Scenario::Lifelong, l);
        CHECK(lf.ais_eps == 0.0);
        CHECK(lf.ais_delta == doctest::Approx(0.2 + 0.01));

        CHECK(parse_scenario("francois-lavet") == Scenario::FrancoisLavet);
        CHECK(to_string(Scenario::DeepMdp) == "deepmdp");
        CHECK_THROWS_AS(parse_scenario("nope"), ModelError);
    }

    TEST_CASE("controllers") {
        std::mt19937_64 rng(45);
        auto c = random_controller(3, 2, 2, rng);
        for (std::size_t n = 0; n < 3; ++n) CHECK(c.action_prob[n * 2] + c.action_prob[n * 2 + 1] == doctest::Approx(1));
        History h{{{1, 0}, {0, 1}}};
        std::size_t n = c.initial;
        for (auto& s : h.steps) n = c.next[(n * 2 + s.action) * 2 + s.observation];
        CHECK(c.node_of(h) == n);
    }
}
