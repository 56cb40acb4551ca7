#pragma once

#include "aisplan/model.hpp"

#include <string>

namespace aisplan {

/// Parses either the JSON model schema or the legacy line-oriented POMDP format
/// (detected by the first non-blank character). Validates the result.
PomdpModel parse_model(const std::string& text);
PomdpModel parse_model_json(const std::string& text);
/// Legacy format; rewards r(s,a,s',o) are marginalized to r(s,a).
PomdpModel parse_model_legacy(const std::string& text);
PomdpModel load_model(const std::string& path);

/// Canonical JSON form.
std::string serialize_model(const PomdpModel& m);
void save_model(const PomdpModel& m, const std::string& path);

std::string read_text_file(const std::string& path);

} // namespace aisplan
