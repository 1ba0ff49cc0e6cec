#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace oligo::cli {

// A run manifest holds everything needed to repeat a run: the subcommand and
// its fully resolved configuration. The remaining fields are informational.
struct Manifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::string output;  // CSV path
  unsigned threads = 1;
  std::string started_at;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const Manifest& manifest);

/// Throws ParseError if the file is unreadable or lacks command/config.
Manifest load_manifest(const std::filesystem::path& path);

/// <output>.manifest.json
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

std::string utc_timestamp(std::chrono::system_clock::time_point when);

}  // namespace oligo::cli
