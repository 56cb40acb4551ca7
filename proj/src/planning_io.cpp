#include "aisplan/planning_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace aisplan {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json num(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

} // namespace

std::string value_tables_csv(const ValueTables& v) {
    std::ostringstream os;
    os << "stage,key,value,greedy_action";
    for (std::size_t a = 0; a < v.n_actions; ++a) os << ",q_" << a;
    os << "\n";
    for (std::size_t k = 0; k < v.stages.size(); ++k) {
        const auto& st = v.stages[k];
        const std::string stage = v.stationary ? "inf" : std::to_string(k + 1);
        for (std::size_t x = 0; x < st.value.size(); ++x) {
            os << stage << "," << csv_field(x < st.keys.size() ? st.keys[x] : std::to_string(x)) << ","
               << format_number(st.value[x]) << "," << st.greedy[x];
            for (std::size_t a = 0; a < v.n_actions; ++a) os << "," << format_number(st.q[x * v.n_actions + a]);
            os << "\n";
        }
    }
    return os.str();
}

std::string value_tables_json(const ValueTables& v) {
    json j;
    j["actions"] = v.n_actions;
    j["discount"] = v.discount;
    j["stationary"] = v.stationary;
    json stages = json::array();
    for (const auto& st : v.stages)
        stages.push_back(json{{"keys", st.keys}, {"value", nums(st.value)}, {"q", nums(st.q)}, {"greedy", st.greedy}});
    j["stages"] = stages;
    return j.dump(2) + "\n";
}

std::string bound_report_csv(const BoundReport& r) {
    std::ostringstream os;
    os << "stage,eps,delta,rho,alpha,policy_bound\n";
    for (std::size_t t = 0; t < r.alpha.size(); ++t)
        os << (r.stationary ? std::string("inf") : std::to_string(t + 1)) << "," << format_number(r.eps[t]) << ","
           << format_number(r.delta[t]) << "," << format_number(r.rho[t]) << "," << format_number(r.alpha[t]) << ","
           << format_number(r.policy_bound[t]) << "\n";
    return os.str();
}

std::string bound_report_json(const BoundReport& r) {
    json j{{"fclass", to_string(r.kind)},
           {"variant", to_string(r.variant)},
           {"discount", r.discount},
           {"stationary", r.stationary},
           {"eps", nums(r.eps)},
           {"delta", nums(r.delta)},
           {"rho", nums(r.rho)},
           {"alpha", nums(r.alpha)},
           {"policy_bound", nums(r.policy_bound)}};
    return j.dump(2) + "\n";
}

std::string comparison_csv(const Comparison& c) {
    std::ostringstream os;
    os << "scenario,ais_eps,ais_delta,ais_rho,ais_bound,literature_bound,ratio\n"
       << to_string(c.scenario) << "," << format_number(c.ais_eps) << "," << format_number(c.ais_delta) << ","
       << format_number(c.ais_rho) << "," << format_number(c.ais_bound) << ","
       << format_number(c.literature_bound) << "," << format_number(c.ratio) << "\n";
    return os.str();
}

std::string comparison_json(const Comparison& c) {
    json j{{"scenario", to_string(c.scenario)}, {"ais_eps", num(c.ais_eps)},
           {"ais_delta", num(c.ais_delta)},     {"ais_rho", num(c.ais_rho)},
           {"ais_bound", num(c.ais_bound)},     {"literature_bound", num(c.literature_bound)},
           {"ratio", num(c.ratio)}};
    return j.dump(2) + "\n";
}

std::string certificate_csv(const AisCertificate& c) {
    std::ostringstream os;
    os << "stage,eps,delta\n";
    for (std::size_t t = 0; t < c.eps.size(); ++t)
        os << t + 1 << "," << format_number(c.eps[t]) << "," << format_number(c.delta[t]) << "\n";
    return os.str();
}

} // namespace aisplan
