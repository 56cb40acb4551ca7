#include "aisplan/model.hpp"

#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aisplan {

double PomdpModel::reward_min() const { return *std::min_element(reward.begin(), reward.end()); }
double PomdpModel::reward_max() const { return *std::max_element(reward.begin(), reward.end()); }
double PomdpModel::reward_sup_norm() const {
    return std::max(std::abs(reward_min()), std::abs(reward_max()));
}

PomdpModel make_empty_model(std::size_t n_states, std::size_t n_actions,
                            std::size_t n_observations, double discount) {
    PomdpModel m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.n_observations = n_observations;
    m.transition.assign(n_actions * n_states * n_states, 0.0);
    m.observation.assign(n_actions * n_states * n_observations, 0.0);
    m.reward.assign(n_states * n_actions, 0.0);
    m.initial_belief = ProbVector::uniform(n_states);
    m.discount = discount;
    return m;
}

PomdpModel make_mdp(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
                    std::vector<double> reward, double discount, ProbVector initial) {
    PomdpModel m = make_empty_model(n_states, n_actions, n_states, discount);
    m.transition = std::move(transition);
    m.reward = std::move(reward);
    m.initial_belief = std::move(initial);
    for (std::size_t a = 0; a < n_actions; ++a)
        for (std::size_t s = 0; s < n_states; ++s) m.O(a, s, s) = 1.0;
    validate_model(m);
    return m;
}

bool is_fully_observed(const PomdpModel& m) {
    if (m.n_observations != m.n_states) return false;
    for (std::size_t a = 0; a < m.n_actions; ++a)
        for (std::size_t s = 0; s < m.n_states; ++s)
            for (std::size_t y = 0; y < m.n_observations; ++y)
                if (m.O(a, s, y) != (s == y ? 1.0 : 0.0)) return false;
    return true;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ModelError(what); }

void check_row(std::span<const double> row, const std::string& where) {
    double sum = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i])) fail(where + ": non-finite entry at column " + std::to_string(i));
        if (row[i] < -kClampTolerance)
            fail(where + ": negative probability at column " + std::to_string(i));
        sum += row[i];
    }
    if (std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream os;
        os << where << ": row not stochastic (sum " << sum << ")";
        fail(os.str());
    }
}

} // namespace

void validate_model(const PomdpModel& m) {
    if (m.n_states == 0) fail("n_states must be positive");
    if (m.n_actions == 0) fail("n_actions must be positive");
    if (m.n_observations == 0) fail("n_observations must be positive");
    if (m.transition.size() != m.n_actions * m.n_states * m.n_states)
        fail("transition table has wrong size");
    if (m.observation.size() != m.n_actions * m.n_states * m.n_observations)
        fail("observation table has wrong size");
    if (m.reward.size() != m.n_states * m.n_actions) fail("reward table has wrong size");
    if (!(m.discount > 0.0 && m.discount <= 1.0)) fail("discount must lie in (0, 1]");
    for (std::size_t a = 0; a < m.n_actions; ++a)
        for (std::size_t s = 0; s < m.n_states; ++s) {
            std::span<const double> row(&m.transition[(a * m.n_states + s) * m.n_states],
                                        m.n_states);
            check_row(row, "transition[a=" + std::to_string(a) + "][s=" + std::to_string(s) + "]");
        }
    for (std::size_t a = 0; a < m.n_actions; ++a)
        for (std::size_t s = 0; s < m.n_states; ++s) {
            std::span<const double> row(&m.observation[(a * m.n_states + s) * m.n_observations],
                                        m.n_observations);
            check_row(row,
                      "observation[a=" + std::to_string(a) + "][s'=" + std::to_string(s) + "]");
        }
    for (std::size_t s = 0; s < m.n_states; ++s)
        for (std::size_t a = 0; a < m.n_actions; ++a)
            if (!std::isfinite(m.R(s, a)))
                fail("reward[s=" + std::to_string(s) + "][a=" + std::to_string(a) +
                     "] is not finite");
    if (m.initial_belief.size() != m.n_states) fail("initial_belief has wrong size");
    check_row(m.initial_belief.span(), "initial_belief");
    auto check_labels = [](const std::vector<std::string>& l, std::size_t n, const char* what) {
        if (!l.empty() && l.size() != n) fail(std::string(what) + " labels have wrong count");
    };
    check_labels(m.state_labels, m.n_states, "state");
    check_labels(m.action_labels, m.n_actions, "action");
    check_labels(m.observation_labels, m.n_observations, "observation");
}

std::string to_string(const History& h) {
    std::string out;
    for (std::size_t i = 0; i < h.steps.size(); ++i) {
        if (i) out += ' ';
        out += 'a' + std::to_string(h.steps[i].action) + 'y' + std::to_string(h.steps[i].observation);
    }
    return out;
}

std::vector<double> predict_state(const PomdpModel& m, const ProbVector& b, std::size_t a) {
    std::vector<double> out(m.n_states, 0.0);
    for (std::size_t s = 0; s < m.n_states; ++s) {
        if (b[s] == 0.0) continue;
        const double* row = &m.transition[(a * m.n_states + s) * m.n_states];
        for (std::size_t s2 = 0; s2 < m.n_states; ++s2) out[s2] += b[s] * row[s2];
    }
    return out;
}

ProbVector obs_likelihood(const PomdpModel& m, const ProbVector& b, std::size_t a) {
    auto pred = predict_state(m, b, a);
    std::vector<double> out(m.n_observations, 0.0);
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
        if (pred[s2] == 0.0) continue;
        for (std::size_t y = 0; y < m.n_observations; ++y) out[y] += pred[s2] * m.O(a, s2, y);
    }
    return ProbVector(std::move(out));
}

ProbVector belief_update(const PomdpModel& m, const ProbVector& b, std::size_t a, std::size_t y) {
    auto pred = predict_state(m, b, a);
    double norm = 0;
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
        pred[s2] *= m.O(a, s2, y);
        norm += pred[s2];
    }
    if (!(norm > 0.0))
        throw ImpossibleObservation("impossible observation " + std::to_string(y) +
                                    " after action " + std::to_string(a));
    for (auto& x : pred) x /= norm;
    return ProbVector(std::move(pred));
}

double expected_reward(const PomdpModel& m, const ProbVector& b, std::size_t a) {
    double r = 0;
    for (std::size_t s = 0; s < m.n_states; ++s) r += b[s] * m.R(s, a);
    return r;
}

ProbVector belief_of(const PomdpModel& m, const History& h) {
    ProbVector b = m.initial_belief;
    for (const auto& st : h.steps) b = belief_update(m, b, st.action, st.observation);
    return b;
}

double Trajectory::discounted_return(double discount) const {
    double g = 0, w = 1;
    for (const auto& r : records) {
        g += w * r.reward;
        w *= discount;
    }
    return g;
}

Trajectory simulate(const PomdpModel& m, const HistoryPolicy& policy, std::size_t horizon,
                    std::uint64_t seed) {
    if (horizon == 0) throw ModelError("simulate: horizon must be at least 1");
    std::mt19937_64 rng(seed);
    Trajectory traj;
    traj.seed = seed;
    History h;
    ProbVector b = m.initial_belief;
    std::size_t s = sample_index(rng, m.initial_belief.span());
    for (std::size_t t = 0; t < horizon; ++t) {
        ProbVector pa = policy(h);
        if (pa.size() != m.n_actions) throw ModelError("policy returned a distribution of wrong size");
        std::size_t a = sample_index(rng, pa.span());
        std::span<const double> trow(&m.transition[(a * m.n_states + s) * m.n_states], m.n_states);
        std::size_t s2 = sample_index(rng, trow);
        std::span<const double> orow(&m.observation[(a * m.n_states + s2) * m.n_observations],
                                     m.n_observations);
        std::size_t y = sample_index(rng, orow);
        traj.records.push_back({b, s, a, m.R(s, a), s2, y});
        b = belief_update(m, b, a, y);
        h.steps.push_back({a, y});
        s = s2;
    }
    return traj;
}

} // namespace aisplan
