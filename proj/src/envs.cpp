#include "aisplan/envs.hpp"

#include "aisplan/error.hpp"

namespace aisplan {

using namespace env_constants;

EnvSpec tiger() {
    PomdpModel m = make_empty_model(2, 3, 2, 0.95);
    m.state_labels = {"tiger-left", "tiger-right"};
    m.action_labels = {"listen", "open-left", "open-right"};
    m.observation_labels = {"hear-left", "hear-right"};
    const double acc = kTigerListenAccuracy;
    for (std::size_t s = 0; s < 2; ++s) {
        m.T(0, s, s) = 1.0;
        for (std::size_t a = 1; a < 3; ++a)
            for (std::size_t s2 = 0; s2 < 2; ++s2) m.T(a, s, s2) = 0.5;
        m.O(0, s, s) = acc;
        m.O(0, s, 1 - s) = 1 - acc;
        for (std::size_t a = 1; a < 3; ++a) m.O(a, s, 0) = m.O(a, s, 1) = 0.5;
    }
    m.R(0, 0) = m.R(1, 0) = -1;
    m.R(0, 1) = -100; // open-left with the tiger on the left
    m.R(1, 1) = 10;
    m.R(0, 2) = 10;
    m.R(1, 2) = -100;
    m.initial_belief = ProbVector::uniform(2);
    validate_model(m);
    return {"tiger",
            m,
            {{"rewards", "published", "listen -1, treasure +10, tiger -100"},
             {"reset", "published", "opening a door resets the tiger position uniformly"},
             {"discount", "published", "0.95"},
             {"listen_accuracy", "chosen", "0.85, not specified in the source description"},
             {"observation_after_open", "chosen", "uniform, carries no information"}}};
}

EnvSpec voicemail() {
    PomdpModel m = make_empty_model(2, 3, 2, 0.95);
    m.state_labels = {"save", "delete"};
    m.action_labels = {"ask", "save", "delete"};
    m.observation_labels = {"hear-save", "hear-delete"};
    const double acc = kVoicemailAskAccuracy;
    const double prior[2] = {0.65, 0.35};
    for (std::size_t s = 0; s < 2; ++s) {
        m.T(0, s, s) = 1.0;
        for (std::size_t a = 1; a < 3; ++a)
            for (std::size_t s2 = 0; s2 < 2; ++s2) m.T(a, s, s2) = prior[s2];
        m.O(0, s, s) = acc;
        m.O(0, s, 1 - s) = 1 - acc;
        for (std::size_t a = 1; a < 3; ++a) m.O(a, s, 0) = m.O(a, s, 1) = 0.5;
    }
    m.R(0, 0) = m.R(1, 0) = -1;
    m.R(0, 1) = 5;
    m.R(1, 1) = -10;
    m.R(1, 2) = 5;
    m.R(0, 2) = -20;
    m.initial_belief = ProbVector(std::vector<double>{0.65, 0.35});
    validate_model(m);
    return {"voicemail",
            m,
            {{"rewards", "published", "ask -1, correct +5, wrong delete -20, wrong save -10"},
             {"initial_belief", "published", "[0.65, 0.35]"},
             {"next_message", "published", "save/delete moves on to a fresh message"},
             {"discount", "published", "0.95"},
             {"next_message_prior", "chosen", "fresh intent drawn from the initial belief"},
             {"ask_accuracy", "chosen", "0.8, not specified in the source description"},
             {"observation_after_save_delete", "chosen", "uniform"}}};
}

EnvSpec cheese_maze() {
    constexpr std::size_t kNoCell = static_cast<std::size_t>(-1);
    // Grid cells (column, row) and their observation labels 1..7.
    struct Cell {
        int x, y, label;
    };
    const Cell cells[11] = {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}, {3, 0, 2}, {4, 0, 4}, {0, 1, 5},
                            {2, 1, 5}, {4, 1, 5}, {0, 2, 6}, {2, 2, 7}, {4, 2, 6}};
    const std::size_t goal = 9;
    PomdpModel m = make_empty_model(11, 4, 7, 0.7);
    m.action_labels = {"north", "east", "south", "west"};
    for (int k = 1; k <= 7; ++k) m.observation_labels.push_back("o" + std::to_string(k));
    for (std::size_t s = 0; s < 11; ++s)
        m.state_labels.push_back("c" + std::to_string(cells[s].x) + "_" + std::to_string(cells[s].y));
    auto find = [&](int x, int y) -> std::size_t {
        for (std::size_t s = 0; s < 11; ++s)
            if (cells[s].x == x && cells[s].y == y) return s;
        return kNoCell;
    };
    const int dx[4] = {0, 1, 0, -1}, dy[4] = {-1, 0, 1, 0};
    for (std::size_t s = 0; s < 11; ++s)
        for (std::size_t a = 0; a < 4; ++a) {
            std::size_t s2 = s;
            if (s != goal) {
                std::size_t n = find(cells[s].x + dx[a], cells[s].y + dy[a]);
                if (n != kNoCell) s2 = n;
            }
            m.T(a, s, s2) = 1.0;
            if (s != goal && s2 == goal) m.R(s, a) = 1.0;
        }
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t s2 = 0; s2 < 11; ++s2) m.O(a, s2, static_cast<std::size_t>(cells[s2].label - 1)) = 1.0;
    std::vector<double> init(11, 0.1);
    init[goal] = 0.0;
    m.initial_belief = ProbVector(init);
    validate_model(m);
    return {"cheese_maze",
            m,
            {{"layout", "published", "11 cells, 7 observation labels as in the grid figure"},
             {"reward", "published", "+1 on reaching the goal (label 7)"},
             {"discount", "published", "0.7"},
             {"moves", "chosen", "deterministic; bumping into a wall leaves the state unchanged"},
             {"goal", "chosen", "absorbing with zero reward"},
             {"start", "chosen", "uniform over the 10 non-goal cells"}}};
}

EnvSpec bandit() {
    PomdpModel m = make_empty_model(1, 2, 1, 0.9);
    m.state_labels = {"s"};
    m.action_labels = {"good", "bad"};
    m.observation_labels = {"o"};
    m.T(0, 0, 0) = m.T(1, 0, 0) = 1.0;
    m.O(0, 0, 0) = m.O(1, 0, 0) = 1.0;
    m.R(0, 0) = 1.0;
    m.R(0, 1) = 0.0;
    m.initial_belief = ProbVector::uniform(1);
    validate_model(m);
    return {"bandit", m, {{"rewards", "chosen", "(1, 0); action 0 is optimal"}, {"discount", "chosen", "0.9"}}};
}

std::vector<std::string> env_names() { return {"tiger", "voicemail", "cheese_maze", "bandit"}; }

EnvSpec env_by_name(const std::string& name) {
    if (name == "tiger") return tiger();
    if (name == "voicemail") return voicemail();
    if (name == "cheese_maze" || name == "cheesemaze" || name == "cheese-maze") return cheese_maze();
    if (name == "bandit") return bandit();
    throw ModelError("unknown environment \"" + name + "\" (known: tiger, voicemail, cheese_maze, bandit)");
}

} // namespace aisplan
