#include "manifest.hpp"

#include <ctime>
#include <fstream>

#include "oligo/errors.hpp"

namespace oligo::cli {

nlohmann::json to_json(const Manifest& m) {
  return {
      {"tool", "oligosim"},
      {"version", OLIGOSIM_VERSION},
      {"command", m.command},
      {"config", m.config},
      {"results", m.results},
      {"outputs", {{"csv", m.output}}},
      {"exec", {{"threads", m.threads}}},
      {"started_at", m.started_at},
      {"wall_seconds", m.wall_seconds},
  };
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string() ||
      !doc.contains("config") || !doc["config"].is_object()) {
    throw ParseError("manifest '" + path.string() + "' lacks a command or config");
  }
  Manifest m;
  m.command = doc["command"].get<std::string>();
  m.config = doc["config"];
  if (doc.contains("outputs") && doc["outputs"].contains("csv") &&
      doc["outputs"]["csv"].is_string()) {
    m.output = doc["outputs"]["csv"].get<std::string>();
  }
  return m;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  return p;
}

std::string utc_timestamp(std::chrono::system_clock::time_point when) {
  const std::time_t t = std::chrono::system_clock::to_time_t(when);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace oligo::cli
