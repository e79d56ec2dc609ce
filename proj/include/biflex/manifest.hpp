#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include "biflex/config.hpp"

namespace biflex {

inline constexpr const char* tool_version = "0.1.0";

// Reproducibility record for one CLI run: inputs, outputs, overrides, and a
// headline result block that `report` can tabulate. Timestamps live here and
// only here; data files stay byte-identical across reruns.
struct RunManifest {
  std::string subcommand;
  std::string timestamp_utc;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json overrides = json::object();
  json result = json::object();
};

inline std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

inline json to_json(const RunManifest& m) {
  json j;
  j["tool"] = "biflex";
  j["version"] = tool_version;
  j["subcommand"] = m.subcommand;
  j["timestamp_utc"] = m.timestamp_utc;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["overrides"] = m.overrides;
  j["result"] = m.result;
  return j;
}

inline RunManifest manifest_from_json(const json& j, const std::string& label) {
  if (!j.is_object() || !j.contains("tool") || j.at("tool") != "biflex")
    throw parse_error(label + ": not a biflex run manifest");
  RunManifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::string>();
    m.timestamp_utc = j.value("timestamp_utc", std::string{});
    if (j.contains("inputs")) m.inputs = j.at("inputs").get<std::vector<std::string>>();
    if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (j.contains("overrides")) m.overrides = j.at("overrides");
    if (j.contains("result")) m.result = j.at("result");
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(label + ": malformed manifest: " + e.what());
  }
  return m;
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(path.string() + ": invalid JSON: " + e.what());
  }
  return manifest_from_json(j, path.string());
}

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_text_file(path, to_json(m).dump(2) + "\n");
}

}  // namespace biflex
