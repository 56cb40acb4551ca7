#pragma once

#include "aisplan/model.hpp"

#include <string>
#include <vector>

namespace aisplan {

/// Parameters not fixed by the published environment descriptions.
namespace env_constants {
inline constexpr double kTigerListenAccuracy = 0.85;   // chosen, not published
inline constexpr double kVoicemailAskAccuracy = 0.8;   // chosen, not published
} // namespace env_constants

struct EnvNote {
    std::string parameter;
    std::string source; // "published" or "chosen"
    std::string detail;
};

struct EnvSpec {
    std::string name;
    PomdpModel model;
    std::vector<EnvNote> notes;
};

EnvSpec tiger();
EnvSpec voicemail();
EnvSpec cheese_maze();
/// One state, two actions with rewards (1, 0), a single observation.
EnvSpec bandit();

std::vector<std::string> env_names();
/// Throws ModelError listing the known names.
EnvSpec env_by_name(const std::string& name);

} // namespace aisplan
