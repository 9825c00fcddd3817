// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "splitchain/scenario.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SPLITCHAIN_DATA_DIR) / name;
}

inline splitchain::ScenarioFile msi() { return splitchain::load_scenario(data_path("msi_default.json")); }
inline splitchain::ScenarioFile msl() { return splitchain::load_scenario(data_path("msl_default.json")); }

inline double relative_error(double actual, double expected) {
  return (actual - expected) / expected;
}

}  // namespace fixtures
