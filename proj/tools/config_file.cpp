#include "config_file.hpp"

#include "aisplan/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>

void apply_config_file(CLI::App& app, const std::string& path) {
    if (!std::filesystem::exists(path)) throw aisplan::ParseError("file not found: " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::Error& e) {
        throw aisplan::ParseError("config " + path + ": " + e.what());
    }
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--" || it.name.empty()) continue; // section markers
        if (it.name == "config") throw aisplan::ParseError("config " + path + ": nested config files are not allowed");
        std::string key = it.name;
        std::replace(key.begin(), key.end(), '_', '-'); // eval_every == eval-every
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (!opt) throw aisplan::ParseError("config " + path + ": unknown key \"" + it.name + "\"");
        if (opt->count() > 0) continue; // command line wins
        try {
            opt->add_result(it.inputs);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw aisplan::ParseError("config " + path + ": bad value for \"" + it.name + "\": " + e.what());
        }
    }
}
