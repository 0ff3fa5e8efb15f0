#include "terank/manifest.hpp"

#include "terank/digest.hpp"

namespace terank {

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.filename().string(), hex64(fnv1a64_file(path)));
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [name, digest] : inputs) in.push_back({{"file", name}, {"fnv1a64", digest}});
  auto& t = j["timings"] = nlohmann::ordered_json::object();
  for (const auto& [step, secs] : step_times_s) t[step] = secs;
  return j;
}

nlohmann::ordered_json strip_timing(nlohmann::ordered_json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    j.erase("timings");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

}  // namespace terank
