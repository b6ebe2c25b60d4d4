#include "conicricci/presets.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

namespace conicricci {

#ifndef CONICRICCI_PRESET_DIR
#define CONICRICCI_PRESET_DIR "presets"
#endif

std::string default_preset_dir() {
    if (const char* env = std::getenv("CONICRICCI_PRESET_DIR")) return env;
    return CONICRICCI_PRESET_DIR;
}

std::vector<std::string> list_presets(const std::string& dir) {
    const std::string root = dir.empty() ? default_preset_dir() : dir;
    std::vector<std::string> names;
    if (!std::filesystem::is_directory(root)) return names;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

RunConfig load_preset(const std::string& name, const std::string& dir) {
    const std::string root = dir.empty() ? default_preset_dir() : dir;
    const std::filesystem::path path = std::filesystem::path(root) / (name + ".cfg");
    if (!std::filesystem::exists(path))
        throw std::runtime_error("preset '" + name + "' not found in " + root);
    RunConfig cfg = load_config_file(path.string());
    if (cfg.name == "run") cfg.name = name;
    return cfg;
}

}  // namespace conicricci
