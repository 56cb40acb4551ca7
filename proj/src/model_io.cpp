#include "aisplan/model_io.hpp"

#include "aisplan/error.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <map>
#include <sstream>

namespace aisplan {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ParseError("file not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field \"") + name + "\"");
    return *it;
}

std::size_t count_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ParseError(std::string("field \"") + name + "\" must be a positive integer");
    return v.get<std::size_t>();
}

std::vector<double> flat_table(const json& j, const char* name, std::vector<std::size_t> dims) {
    std::vector<double> out;
    std::function<void(const json&, std::size_t, std::string)> walk = [&](const json& v,
                                                                          std::size_t depth,
                                                                          std::string where) {
        if (depth == dims.size()) {
            if (!v.is_number()) throw ParseError("field \"" + std::string(name) + "\"" + where + " is not a number");
            out.push_back(v.get<double>());
            return;
        }
        if (!v.is_array() || v.size() != dims[depth])
            throw ParseError("field \"" + std::string(name) + "\"" + where + " has dimension mismatch: expected " +
                             std::to_string(dims[depth]) + " entries");
        for (std::size_t i = 0; i < v.size(); ++i)
            walk(v[i], depth + 1, where + "[" + std::to_string(i) + "]");
    };
    walk(field(j, name), 0, "");
    return out;
}

std::vector<std::string> labels(const json& j, const char* name, std::size_t n) {
    if (!j.contains(name)) return {};
    const json& v = j.at(name);
    if (!v.is_array() || v.size() != n)
        throw ParseError(std::string("labels.") + name + " has dimension mismatch");
    return v.get<std::vector<std::string>>();
}

} // namespace

PomdpModel parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("JSON syntax error: ") + e.what(), line, col);
    }
    if (!j.is_object()) throw ParseError("model JSON must be an object");
    PomdpModel m;
    m.n_states = count_field(j, "states");
    m.n_actions = count_field(j, "actions");
    m.n_observations = count_field(j, "observations");
    m.transition = flat_table(j, "transition", {m.n_actions, m.n_states, m.n_states});
    m.observation = flat_table(j, "observation", {m.n_actions, m.n_states, m.n_observations});
    m.reward = flat_table(j, "reward", {m.n_states, m.n_actions});
    auto b = flat_table(j, "initial_belief", {m.n_states});
    const json& d = field(j, "discount");
    if (!d.is_number()) throw ParseError("field \"discount\" must be a number");
    m.discount = d.get<double>();
    if (j.contains("labels")) {
        const json& l = j.at("labels");
        m.state_labels = labels(l, "states", m.n_states);
        m.action_labels = labels(l, "actions", m.n_actions);
        m.observation_labels = labels(l, "observations", m.n_observations);
    }
    try {
        m.initial_belief = ProbVector(std::move(b));
        validate_model(m);
    } catch (const ModelError& e) {
        throw ParseError(std::string("semantic error: ") + e.what());
    }
    return m;
}

std::string serialize_model(const PomdpModel& m) {
    json j;
    j["states"] = m.n_states;
    j["actions"] = m.n_actions;
    j["observations"] = m.n_observations;
    json t = json::array();
    for (std::size_t a = 0; a < m.n_actions; ++a) {
        json ta = json::array();
        for (std::size_t s = 0; s < m.n_states; ++s) {
            json row = json::array();
            for (std::size_t s2 = 0; s2 < m.n_states; ++s2) row.push_back(m.T(a, s, s2));
            ta.push_back(row);
        }
        t.push_back(ta);
    }
    j["transition"] = t;
    json o = json::array();
    for (std::size_t a = 0; a < m.n_actions; ++a) {
        json oa = json::array();
        for (std::size_t s = 0; s < m.n_states; ++s) {
            json row = json::array();
            for (std::size_t y = 0; y < m.n_observations; ++y) row.push_back(m.O(a, s, y));
            oa.push_back(row);
        }
        o.push_back(oa);
    }
    j["observation"] = o;
    json r = json::array();
    for (std::size_t s = 0; s < m.n_states; ++s) {
        json row = json::array();
        for (std::size_t a = 0; a < m.n_actions; ++a) row.push_back(m.R(s, a));
        r.push_back(row);
    }
    j["reward"] = r;
    j["initial_belief"] = m.initial_belief.values();
    j["discount"] = m.discount;
    if (!m.state_labels.empty() || !m.action_labels.empty() || !m.observation_labels.empty()) {
        json l = json::object();
        if (!m.state_labels.empty()) l["states"] = m.state_labels;
        if (!m.action_labels.empty()) l["actions"] = m.action_labels;
        if (!m.observation_labels.empty()) l["observations"] = m.observation_labels;
        j["labels"] = l;
    }
    return j.dump(2) + "\n";
}

void save_model(const PomdpModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << serialize_model(m);
}

// ---------------------------------------------------------------------------
// Legacy format

namespace {

struct Token {
    std::string text;
    std::size_t line, col;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        if (c == ':') {
            out.push_back({":", line, col});
            ++i;
            ++col;
            continue;
        }
        std::size_t start = i, scol = col;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               text[i] != ':' && text[i] != '#') {
            ++i;
            ++col;
        }
        out.push_back({text.substr(start, i - start), line, scol});
    }
    return out;
}

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

class LegacyParser {
public:
    explicit LegacyParser(const std::string& text) : toks_(tokenize(text)) {}

    PomdpModel parse() {
        while (pos_ < toks_.size()) statement();
        if (!have_dims()) throw ParseError("legacy model: states/actions/observations not declared");
        if (!discount_) throw ParseError("legacy model: missing \"discount\"");
        PomdpModel m;
        m.n_states = nS_;
        m.n_actions = nA_;
        m.n_observations = nO_;
        m.transition = T_;
        m.observation = O_;
        m.reward.assign(nS_ * nA_, 0.0);
        for (std::size_t s = 0; s < nS_; ++s)
            for (std::size_t a = 0; a < nA_; ++a) {
                double r = 0;
                for (std::size_t s2 = 0; s2 < nS_; ++s2) {
                    double t = T_[(a * nS_ + s) * nS_ + s2];
                    if (t == 0) continue;
                    for (std::size_t o = 0; o < nO_; ++o)
                        r += t * O_[(a * nS_ + s2) * nO_ + o] * R4_[idx4(a, s, s2, o)];
                }
                m.reward[s * nA_ + a] = cost_ ? -r : r;
            }
        m.discount = *discount_;
        m.state_labels = sn_;
        m.action_labels = an_;
        m.observation_labels = on_;
        try {
            m.initial_belief = start_.empty() ? ProbVector::uniform(nS_) : ProbVector(start_);
            validate_model(m);
        } catch (const ModelError& e) {
            throw ParseError(std::string("semantic error: ") + e.what());
        }
        return m;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t nS_ = 0, nA_ = 0, nO_ = 0;
    std::vector<std::string> sn_, an_, on_;
    std::optional<double> discount_;
    bool cost_ = false;
    std::vector<double> start_;
    std::vector<double> T_, O_, R4_;

    bool have_dims() const { return nS_ && nA_ && nO_; }
    std::size_t idx4(std::size_t a, std::size_t s, std::size_t s2, std::size_t o) const {
        return ((a * nS_ + s) * nS_ + s2) * nO_ + o;
    }

    [[noreturn]] void error(const std::string& msg) const {
        const Token& t = pos_ < toks_.size() ? toks_[pos_] : toks_.back();
        throw ParseError("legacy model: " + msg, t.line, t.col);
    }

    const Token& peek() const {
        if (pos_ >= toks_.size()) error("unexpected end of input");
        return toks_[pos_];
    }
    bool at_end() const { return pos_ >= toks_.size(); }
    std::string next() { return toks_[pos_++].text; }

    void expect_colon() {
        if (at_end() || peek().text != ":") error("expected ':'");
        ++pos_;
    }

    bool at_keyword() const {
        if (at_end()) return true;
        static const char* kw[] = {"discount", "values", "states", "actions", "observations",
                                   "start", "T", "O", "R"};
        const std::string& s = toks_[pos_].text;
        for (auto k : kw)
            if (s == k && pos_ + 1 < toks_.size() &&
                (toks_[pos_ + 1].text == ":" || (s == "start" && (toks_[pos_ + 1].text == "include" ||
                                                                  toks_[pos_ + 1].text == "exclude"))))
                return true;
        return false;
    }

    double number() {
        if (at_end() || !is_number(peek().text)) error("expected a number");
        return std::strtod(next().c_str(), nullptr);
    }

    void declare(std::size_t& n, std::vector<std::string>& names) {
        expect_colon();
        if (!at_end() && is_number(peek().text) && (pos_ + 1 >= toks_.size() || at_keyword_after())) {
            n = static_cast<std::size_t>(number());
            return;
        }
        while (!at_keyword()) names.push_back(next());
        n = names.size();
        if (n == 0) error("empty declaration");
    }
    bool at_keyword_after() {
        ++pos_;
        bool k = at_keyword();
        --pos_;
        return k;
    }

    // Resolves an index token ("*" returns all).
    std::vector<std::size_t> resolve(const std::vector<std::string>& names, std::size_t n) {
        std::string s = next();
        if (s == "*") {
            std::vector<std::size_t> all(n);
            for (std::size_t i = 0; i < n; ++i) all[i] = i;
            return all;
        }
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == s) return {i};
        if (is_number(s)) {
            long v = std::strtol(s.c_str(), nullptr, 10);
            if (v >= 0 && static_cast<std::size_t>(v) < n) return {static_cast<std::size_t>(v)};
        }
        --pos_;
        error("unknown identifier \"" + s + "\"");
    }

    std::vector<double> numbers_until_keyword() {
        std::vector<double> v;
        while (!at_keyword()) {
            if (!is_number(peek().text)) {
                const std::string& t = peek().text;
                if (t == "uniform" || t == "identity") {
                    v.push_back(t == "uniform" ? -1.0 : -2.0);
                    ++pos_;
                    // marker handled by caller
                    return {t == "uniform" ? -1.0 : -2.0};
                }
                error("expected a number, got \"" + t + "\"");
            }
            v.push_back(number());
        }
        return v;
    }

    void ensure_tables() {
        if (!have_dims()) error("T/O/R before states/actions/observations declarations");
        if (T_.empty()) {
            T_.assign(nA_ * nS_ * nS_, 0.0);
            O_.assign(nA_ * nS_ * nO_, 0.0);
            R4_.assign(nA_ * nS_ * nS_ * nO_, 0.0);
        }
    }

    // Generic "X: i : j : k v" block filler over a 3-index table (or 4 for R).
    void statement() {
        std::string kw = next();
        if (kw == "discount") {
            expect_colon();
            discount_ = number();
        } else if (kw == "values") {
            expect_colon();
            std::string v = next();
            if (v == "cost")
                cost_ = true;
            else if (v != "reward")
                error("values must be reward or cost");
        } else if (kw == "states") {
            declare(nS_, sn_);
        } else if (kw == "actions") {
            declare(nA_, an_);
        } else if (kw == "observations") {
            declare(nO_, on_);
        } else if (kw == "start") {
            start_statement();
        } else if (kw == "T") {
            ensure_tables();
            matrix3(T_, an_, nA_, sn_, nS_, sn_, nS_);
        } else if (kw == "O") {
            ensure_tables();
            matrix3(O_, an_, nA_, sn_, nS_, on_, nO_);
        } else if (kw == "R") {
            ensure_tables();
            reward_statement();
        } else {
            --pos_;
            error("unknown keyword \"" + kw + "\"");
        }
    }

    void start_statement() {
        if (!nS_) error("start before states declaration");
        if (!at_end() && (peek().text == "include" || peek().text == "exclude")) {
            bool include = next() == "include";
            expect_colon();
            std::vector<bool> in(nS_, !include);
            while (!at_keyword())
                for (auto s : resolve(sn_, nS_)) in[s] = include;
            std::size_t k = 0;
            for (bool b : in) k += b;
            if (k == 0) error("start set is empty");
            start_.assign(nS_, 0.0);
            for (std::size_t s = 0; s < nS_; ++s)
                if (in[s]) start_[s] = 1.0 / static_cast<double>(k);
            return;
        }
        expect_colon();
        if (!at_end() && peek().text == "uniform") {
            ++pos_;
            start_.assign(nS_, 1.0 / static_cast<double>(nS_));
            return;
        }
        if (!at_end() && !is_number(peek().text)) {
            auto s = resolve(sn_, nS_);
            start_.assign(nS_, 0.0);
            start_[s[0]] = 1.0;
            return;
        }
        auto v = numbers_until_keyword();
        if (v.size() != nS_) error("start vector has dimension mismatch");
        start_ = v;
    }

    // table indexed [a][i][j], sizes nA x ni x nj
    void matrix3(std::vector<double>& tab, const std::vector<std::string>& a_names, std::size_t na,
                 const std::vector<std::string>& i_names, std::size_t ni,
                 const std::vector<std::string>& j_names, std::size_t nj) {
        expect_colon();
        auto as = resolve(a_names, na);
        auto at = [&](std::size_t a, std::size_t i, std::size_t j) -> double& {
            return tab[(a * ni + i) * nj + j];
        };
        if (!at_end() && peek().text == ":") {
            ++pos_;
            auto is = resolve(i_names, ni);
            if (!at_end() && peek().text == ":") {
                ++pos_;
                auto js = resolve(j_names, nj);
                double p = number();
                for (auto a : as)
                    for (auto i : is)
                        for (auto j : js) at(a, i, j) = p;
                return;
            }
            auto v = numbers_until_keyword();
            if (v.size() == 1 && v[0] == -1.0) v.assign(nj, 1.0 / static_cast<double>(nj));
            if (v.size() != nj) error("row has dimension mismatch");
            for (auto a : as)
                for (auto i : is)
                    for (std::size_t j = 0; j < nj; ++j) at(a, i, j) = v[j];
            return;
        }
        auto v = numbers_until_keyword();
        std::vector<double> full(ni * nj);
        if (v.size() == 1 && v[0] == -1.0) {
            full.assign(ni * nj, 1.0 / static_cast<double>(nj));
        } else if (v.size() == 1 && v[0] == -2.0) {
            if (ni != nj) error("identity requires a square matrix");
            full.assign(ni * nj, 0.0);
            for (std::size_t i = 0; i < ni; ++i) full[i * nj + i] = 1.0;
        } else {
            if (v.size() != ni * nj) error("matrix has dimension mismatch");
            full = v;
        }
        for (auto a : as)
            for (std::size_t i = 0; i < ni; ++i)
                for (std::size_t j = 0; j < nj; ++j) at(a, i, j) = full[i * nj + j];
    }

    void reward_statement() {
        expect_colon();
        auto as = resolve(an_, nA_);
        expect_colon();
        auto ss = resolve(sn_, nS_);
        if (!at_end() && peek().text == ":") {
            ++pos_;
            auto s2s = resolve(sn_, nS_);
            if (!at_end() && peek().text == ":") {
                ++pos_;
                auto os = resolve(on_, nO_);
                double v = number();
                for (auto a : as)
                    for (auto s : ss)
                        for (auto s2 : s2s)
                            for (auto o : os) R4_[idx4(a, s, s2, o)] = v;
                return;
            }
            auto v = numbers_until_keyword();
            if (v.size() != nO_) error("reward row has dimension mismatch");
            for (auto a : as)
                for (auto s : ss)
                    for (auto s2 : s2s)
                        for (std::size_t o = 0; o < nO_; ++o) R4_[idx4(a, s, s2, o)] = v[o];
            return;
        }
        auto v = numbers_until_keyword();
        if (v.size() != nS_ * nO_) error("reward matrix has dimension mismatch");
        for (auto a : as)
            for (auto s : ss)
                for (std::size_t s2 = 0; s2 < nS_; ++s2)
                    for (std::size_t o = 0; o < nO_; ++o) R4_[idx4(a, s, s2, o)] = v[s2 * nO_ + o];
    }
};

} // namespace

PomdpModel parse_model_legacy(const std::string& text) {
    auto toks = tokenize(text);
    if (toks.empty()) throw ParseError("legacy model: empty input");
    return LegacyParser(text).parse();
}

PomdpModel parse_model(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_model_json(text);
        break;
    }
    return parse_model_legacy(text);
}

PomdpModel load_model(const std::string& path) { return parse_model(read_text_file(path)); }

} // namespace aisplan
