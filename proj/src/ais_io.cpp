#include "aisplan/ais_io.hpp"

#include "aisplan/error.hpp"

#include <json.hpp>

#include <map>
#include <memory>

namespace aisplan {

using nlohmann::json;

namespace {

json cert_json(const AisCertificate& c) {
    return json{{"fclass", to_string(c.kind)},
                {"exponent", c.exponent},
                {"eps", c.eps},
                {"delta", c.delta},
                {"measured", c.measured}};
}

AisCertificate cert_from(const json& j) {
    AisCertificate c;
    try {
        c.kind = parse_ipm_kind(j.at("fclass").get<std::string>());
        c.exponent = j.value("exponent", 1.0);
        c.eps = j.at("eps").get<std::vector<double>>();
        c.delta = j.at("delta").get<std::vector<double>>();
        c.measured = j.value("measured", true);
    } catch (const json::exception& e) {
        throw ParseError(std::string("certificate: ") + e.what());
    }
    if (c.eps.size() != c.delta.size()) throw ParseError("certificate: eps and delta have different lengths");
    for (std::size_t i = 0; i < c.eps.size(); ++i)
        if (c.eps[i] < 0 || c.delta[i] < 0) throw ParseError("certificate: negative entry");
    return c;
}

json sparse_json(const SparseDist& d) {
    json a = json::array();
    for (auto [i, p] : d) a.push_back(json::array({i, p}));
    return a;
}

SparseDist sparse_from(const json& j) {
    SparseDist d;
    for (auto& e : j) d.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<double>());
    return d;
}

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": JSON syntax error: " + e.what());
    }
}

} // namespace

std::string serialize_certificate(const AisCertificate& c) { return cert_json(c).dump(2) + "\n"; }

AisCertificate parse_certificate(const std::string& text) {
    json j = parse_json(text, "certificate");
    if (j.contains("certificate")) return cert_from(j.at("certificate"));
    return cert_from(j);
}

std::string serialize_generator(const AisGenerator& g, const PomdpModel* model, std::size_t horizon) {
    json j;
    j["actions"] = g.n_actions;
    j["observations"] = g.n_observations;
    j["discount"] = g.discount;
    j["stationary"] = g.stationary;
    j["stochastic"] = g.stochastic;
    if (!g.action_set.empty()) j["action_set"] = g.action_set;
    if (!g.action_map.empty()) j["action_map"] = g.action_map;
    json stages = json::array();
    for (const auto& st : g.stages) {
        json s;
        s["size"] = st.space.size;
        s["metric"] = to_string(st.space.metric);
        if (!st.space.points.empty()) s["points"] = st.space.points;
        if (!st.space.explicit_dist.empty()) s["distances"] = st.space.explicit_dist;
        s["reward"] = st.reward;
        json k = json::array();
        for (auto& row : st.kernel) k.push_back(sparse_json(row));
        s["kernel"] = k;
        if (!st.update.empty()) {
            json u = json::array();
            for (auto v : st.update) u.push_back(v == kNoNode ? json(-1) : json(v));
            s["update"] = u;
        }
        if (!st.obs_predictor.empty()) s["obs_predictor"] = st.obs_predictor;
        stages.push_back(s);
    }
    j["stages"] = stages;
    json c{{"kind", g.descriptor.kind}};
    if (g.descriptor.kind == "belief_quantization" || g.descriptor.kind == "exact_belief") {
        c["n"] = g.descriptor.n;
        c["kernel"] = g.descriptor.kernel;
    }
    if ((g.descriptor.kind == "custom" || g.descriptor.kind == "table") && model && horizon > 0) {
        c["kind"] = "table";
        json entries = json::array();
        HistoryTree tree(*model, horizon, std::max(horizon, kDefaultHistoryCap));
        for (std::size_t t = 1; t <= horizon; ++t)
            for (std::size_t i = 0; i < tree.stage(t).size(); ++i) {
                History h = tree.history(t, i);
                json steps = json::array();
                for (auto& s : h.steps) steps.push_back(json::array({s.action, s.observation}));
                entries.push_back(json{{"history", steps}, {"dist", sparse_json(g.compress(h))}});
            }
        c["entries"] = entries;
    }
    j["compress"] = c;
    if (g.declared) j["declared"] = cert_json(*g.declared);
    return j.dump(2) + "\n";
}

AisGenerator parse_generator(const std::string& text, const PomdpModel* model) {
    json j = parse_json(text, "generator");
    AisGenerator g;
    try {
        g.n_actions = j.at("actions").get<std::size_t>();
        g.n_observations = j.at("observations").get<std::size_t>();
        g.discount = j.at("discount").get<double>();
        g.stationary = j.at("stationary").get<bool>();
        g.stochastic = j.value("stochastic", false);
        if (j.contains("action_set")) g.action_set = j["action_set"].get<std::vector<std::size_t>>();
        if (j.contains("action_map")) g.action_map = j["action_map"].get<std::vector<std::size_t>>();
        for (auto& s : j.at("stages")) {
            AisStage st;
            st.space.size = s.at("size").get<std::size_t>();
            st.space.metric = parse_ground_metric(s.value("metric", std::string("discrete")));
            if (s.contains("points")) st.space.points = s["points"].get<std::vector<std::vector<double>>>();
            if (s.contains("distances")) st.space.explicit_dist = s["distances"].get<std::vector<double>>();
            st.reward = s.at("reward").get<std::vector<double>>();
            for (auto& row : s.at("kernel")) st.kernel.push_back(sparse_from(row));
            if (s.contains("update"))
                for (auto& v : s["update"]) {
                    long long x = v.get<long long>();
                    st.update.push_back(x < 0 ? kNoNode : static_cast<std::size_t>(x));
                }
            if (s.contains("obs_predictor"))
                st.obs_predictor = s["obs_predictor"].get<std::vector<std::vector<double>>>();
            g.stages.push_back(std::move(st));
        }
        if (j.contains("declared")) g.declared = cert_from(j["declared"]);
        const json& c = j.at("compress");
        g.descriptor.kind = c.at("kind").get<std::string>();
        if (g.descriptor.kind == "belief_quantization" || g.descriptor.kind == "exact_belief") {
            if (!model) throw ParseError("generator: belief compression needs the model");
            g.descriptor.n = c.at("n").get<std::size_t>();
            g.descriptor.kernel = c.value("kernel", std::string("exact"));
            std::vector<std::vector<std::vector<double>>> pts;
            for (auto& st : g.stages) pts.push_back(st.space.points);
            g.compress = belief_point_compression(*model, g.descriptor.n, g.stationary, pts);
        } else if (g.descriptor.kind == "mdp_state") {
            if (!model) throw ParseError("generator: MDP compression needs the model");
            SparseDist init;
            for (std::size_t s = 0; s < model->n_states; ++s)
                if (model->initial_belief[s] > 0) init.emplace_back(s, model->initial_belief[s]);
            g.compress = [init](const History& h) -> SparseDist {
                if (h.steps.empty()) return init;
                return {{h.steps.back().observation, 1.0}};
            };
        } else if (g.descriptor.kind == "constant") {
            g.compress = [](const History&) -> SparseDist { return {{0, 1.0}}; };
        } else if (g.descriptor.kind == "table") {
            auto table = std::make_shared<std::map<std::vector<std::size_t>, SparseDist>>();
            for (auto& e : c.at("entries")) {
                std::vector<std::size_t> key;
                for (auto& s : e.at("history")) {
                    key.push_back(s.at(0).get<std::size_t>());
                    key.push_back(s.at(1).get<std::size_t>());
                }
                (*table)[key] = sparse_from(e.at("dist"));
            }
            g.compress = [table](const History& h) -> SparseDist {
                std::vector<std::size_t> key;
                for (auto& s : h.steps) {
                    key.push_back(s.action);
                    key.push_back(s.observation);
                }
                auto it = table->find(key);
                if (it == table->end()) throw ModelError("history not in the compression table: " + to_string(h));
                return it->second;
            };
        } else {
            g.compress = [](const History&) -> SparseDist {
                throw ModelError("generator was serialized without its compression");
            };
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("generator: ") + e.what());
    }
    try {
        validate_generator(g);
    } catch (const ModelError& e) {
        throw ParseError(std::string("generator: ") + e.what());
    }
    return g;
}

} // namespace aisplan
