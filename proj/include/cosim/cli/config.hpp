#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cosim/master.hpp"

namespace cosim::cli {

inline constexpr int current_schema_version = 1;

/// A parsed configuration file: the scenario ready to run plus the settings
/// that only the commands use.
struct RunConfig {
  Scenario scenario;
  /// Solver step of the monolithic reference used by `compare`.
  double monolithic_dt = 1e-4;
  std::optional<std::string> output;
  /// Reserved; the built-in scenarios are deterministic.
  std::uint64_t seed = 0;
  /// The configuration with every default filled in. Parsing it again gives
  /// the same scenario.
  nlohmann::ordered_json effective;
};

/// Builds a RunConfig from a JSON document. Throws configuration_error
/// naming the offending field for unknown keys, wrong types, and values
/// outside their valid range.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a configuration file.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

}  // namespace cosim::cli
