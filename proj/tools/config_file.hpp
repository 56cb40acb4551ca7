#pragma once

#include <string>

namespace CLI {
class App;
}

/// Applies `key = value` lines from a TOML-style file to the options of `app`
/// that were not given on the command line. Keys name long flags without the
/// leading dashes. Throws aisplan::ParseError on unknown keys or unreadable files.
void apply_config_file(CLI::App& app, const std::string& path);
