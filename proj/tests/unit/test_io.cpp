#include "aisplan/ais.hpp"
#include "aisplan/ais_io.hpp"
#include "aisplan/envs.hpp"
#include "aisplan/error.hpp"
#include "aisplan/history_tree.hpp"
#include "aisplan/model_io.hpp"
#include "aisplan/random_models.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

using namespace aisplan;

namespace {

void same_compression(const PomdpModel& m, const AisGenerator& a, const AisGenerator& b, std::size_t H) {
    HistoryTree tree(m, H);
    for (std::size_t t = 1; t <= H; ++t)
        for (std::size_t i = 0; i < tree.stage(t).size(); ++i) {
            History h = tree.history(t, i);
            auto x = a.compress(h), y = b.compress(h);
            REQUIRE(x.size() == y.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                CHECK(x[k].first == y[k].first);
                CHECK(x[k].second == doctest::Approx(y[k].second));
            }
        }
}

void same_tables(const AisGenerator& a, const AisGenerator& b) {
    CHECK(a.stationary == b.stationary);
    CHECK(a.stochastic == b.stochastic);
    REQUIRE(a.stages.size() == b.stages.size());
    for (std::size_t t = 0; t < a.stages.size(); ++t) {
        CHECK(a.stages[t].space.size == b.stages[t].space.size);
        CHECK(a.stages[t].reward == b.stages[t].reward);
        CHECK(a.stages[t].kernel == b.stages[t].kernel);
        CHECK(a.stages[t].update == b.stages[t].update);
    }
}

std::string thrown(auto&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

const char* kLegacy = R"(# two-state test model
discount: 0.9
values: reward
states: 2
actions: stay flip
observations: 2
start: uniform
T: stay
identity
T: flip
0 1
1 0
O: * : 0 : 0 0.8
O: * : 0 : 1 0.2
O: * : 1 : 0 0.3
O: * : 1 : 1 0.7
R: flip : 0 : * : * 2
R: stay : 1 : * : 0 4
R: stay : 1 : * : 1 -1
)";

} // namespace

TEST_SUITE("ais_io") {
    TEST_CASE("certificate round trip") {
        AisCertificate c;
        c.kind = IpmKind::BoundedLipschitz;
        c.eps = {0.1, 0.2, 1.0 / 3.0};
        c.delta = {0.5, 0.25, 0.0};
        c.measured = false;
        AisCertificate d = parse_certificate(serialize_certificate(c));
        CHECK(d.kind == c.kind);
        CHECK(d.eps == c.eps);
        CHECK(d.delta == c.delta);
        CHECK(d.measured == c.measured);
    }

    TEST_CASE("certificate errors") {
        CHECK_THROWS_AS(parse_certificate("{\"kind\": \"tv\""), ParseError);
        CHECK_THROWS_AS(parse_certificate(R"({"kind":"tv","eps":[0.1],"delta":[0.1,0]})"), ParseError);
        CHECK_THROWS_AS(parse_certificate(R"({"kind":"tv","eps":[-0.1],"delta":[0]})"), ParseError);
    }

    TEST_CASE("belief quantization generator round trip") {
        PomdpModel m = tiger().model;
        for (auto kern : {BeliefKernel::ExactUpdate, BeliefKernel::QuantizedUpdate}) {
            BeliefQuantOptions o;
            o.kernel = kern;
            AisGenerator g = build_belief_quant_ais(m, 3, 5, IpmKind::BoundedLipschitz, o);
            AisGenerator h = parse_generator(serialize_generator(g), &m);
            same_tables(g, h);
            same_compression(m, g, h, 3);
            REQUIRE(h.declared);
            CHECK(h.declared->eps == g.declared->eps);
            CHECK(h.descriptor.kind == "belief_quantization");
        }
        AisGenerator g = build_belief_quant_ais(m, 3, 5);
        CHECK_THROWS_AS(parse_generator(serialize_generator(g)), ParseError);
    }

    TEST_CASE("MDP and constant generators round trip") {
        std::mt19937_64 rng(4);
        PomdpModel mdp = random_mdp(rng, 3, 2);
        AisGenerator g = mdp_generator(mdp);
        AisGenerator h = parse_generator(serialize_generator(g), &mdp);
        same_tables(g, h);
        same_compression(mdp, g, h, 3);

        PomdpModel m = voicemail().model;
        AisGenerator c = constant_generator(m, 4, {-1, 0, 0});
        AisGenerator d = parse_generator(serialize_generator(c), &m);
        same_tables(c, d);
        same_compression(m, c, d, 4);
    }

    TEST_CASE("custom compression is tabulated") {
        PomdpModel m = tiger().model;
        AisGenerator g = build_belief_quant_ais(m, 2, 3);
        g.descriptor.kind = "custom";
        AisGenerator h = parse_generator(serialize_generator(g, &m, 2));
        same_compression(m, g, h, 2);
        AisGenerator bare = parse_generator(serialize_generator(g));
        CHECK_THROWS_AS(bare.compress(History{}), ModelError);
    }
}

TEST_SUITE("model_io") {
    TEST_CASE("JSON round trip") {
        std::mt19937_64 rng(8);
        PomdpModel m = random_pomdp(rng, 3, 2, 2);
        PomdpModel r = parse_model(serialize_model(m));
        CHECK(r.transition == m.transition);
        CHECK(r.observation == m.observation);
        CHECK(r.reward == m.reward);
        CHECK(r.discount == m.discount);
        CHECK(serialize_model(r) == serialize_model(m));

        auto path = std::filesystem::temp_directory_path() / "aisplan_model_io_test.json";
        save_model(m, path.string());
        CHECK(serialize_model(load_model(path.string())) == serialize_model(m));
        std::filesystem::remove(path);
    }

    TEST_CASE("legacy format") {
        PomdpModel m = parse_model(kLegacy);
        CHECK(m.n_states == 2);
        CHECK(m.n_actions == 2);
        CHECK(m.action_labels[1] == "flip");
        CHECK(m.discount == 0.9);
        CHECK(m.initial_belief[0] == doctest::Approx(0.5));
        CHECK(m.T(0, 1, 1) == 1);
        CHECK(m.T(1, 0, 1) == 1);
        CHECK(m.O(1, 1, 0) == doctest::Approx(0.3));
        CHECK(m.R(0, 1) == doctest::Approx(2));
        // stay from state 1 lands in 1: 0.3 * 4 + 0.7 * (-1)
        CHECK(m.R(1, 0) == doctest::Approx(0.5));
        CHECK(m.R(0, 0) == 0);
    }

    TEST_CASE("legacy costs are negated") {
        std::string t = kLegacy;
        t.replace(t.find("values: reward"), 14, "values: cost");
        PomdpModel m = parse_model(t);
        CHECK(m.R(0, 1) == doctest::Approx(-2));
    }

    TEST_CASE("errors carry useful messages") {
        PomdpModel m = bandit().model;
        std::string good = serialize_model(m);

        std::string missing = good;
        missing.replace(missing.find("\"discount\""), 10, "\"discounts\"");
        CHECK(thrown([&] { parse_model(missing); }).find("missing field \"discount\"") != std::string::npos);

        std::string dim = good;
        dim.replace(dim.find("\"states\": 1"), 11, "\"states\": 2");
        CHECK(thrown([&] { parse_model(dim); }).find("dimension mismatch") != std::string::npos);

        std::string syntax = "{\n  \"states\": 1,\n  \"actions\" 2\n}";
        CHECK(thrown([&] { parse_model(syntax); }).find("line 3") != std::string::npos);

        CHECK(thrown([] { load_model("/nonexistent/model.json"); }).find("file not found") != std::string::npos);

        std::string bad_prob = good;
        bad_prob.replace(bad_prob.find("\"initial_belief\": [\n    1.0"), 26, "\"initial_belief\": [\n    0.5");
        CHECK(thrown([&] { parse_model(bad_prob); }).find("semantic error") != std::string::npos);

        std::string legacy = kLegacy;
        legacy.replace(legacy.find("0 1\n1 0"), 7, "0 1\n1 zero");
        CHECK(thrown([&] { parse_model(legacy); }).find("line") != std::string::npos);
    }
}
