#pragma once

#include <string>
#include <vector>

#include "conicricci/config.hpp"

namespace conicricci {

/// Preset configs are data files (<name>.cfg). The directory defaults to the
/// compiled-in catalog path and can be overridden by CONICRICCI_PRESET_DIR.
std::string default_preset_dir();
std::vector<std::string> list_presets(const std::string& dir = "");
RunConfig load_preset(const std::string& name, const std::string& dir = "");

}  // namespace conicricci
