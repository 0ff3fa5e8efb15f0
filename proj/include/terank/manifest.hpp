#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace terank {

inline constexpr const char* kToolVersion = "terank 0.1.0";

/// Everything needed to reproduce a machine-readable output: the resolved
/// configuration, digests of the inputs and the tool version. Step timings
/// are carried alongside but excluded from reproducibility comparisons.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // file name, FNV-1a digest
  std::vector<std::pair<std::string, double>> step_times_s;

  void add_input(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

/// Drops every "wall_time_s" and "timings" key, recursively.
nlohmann::ordered_json strip_timing(nlohmann::ordered_json j);

}  // namespace terank
