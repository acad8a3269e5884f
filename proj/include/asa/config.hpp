#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asa/lime.hpp"
#include "asa/model_spec.hpp"

namespace asa {

/// Environment variable that overrides the seed from a config file.
inline constexpr const char* kSeedEnvVar = "ASA_SEED";

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; a later duplicate key wins. Lines without '=' are a UsageError.
std::map<std::string, std::string> parse_key_values(std::string_view content);

/// Settings for train / evaluate / explain / experiment runs.
struct RunConfig {
  ModelSpec spec;
  std::string corpus;  // directory written by `prepare`
  std::string out;     // output directory
  lime::LimeConfig lime;

  /// Every key a config file may contain.
  static std::vector<std::string> keys();
  /// Applies key/value pairs; unknown keys are collected into one UsageError.
  void apply(const std::map<std::string, std::string>& values);
  std::map<std::string, std::string> to_key_values() const;
};

/// Builds a RunConfig with precedence CLI flag > ASA_SEED > file > default.
/// `env_seed` is the environment value, if any.
RunConfig resolve_run_config(const std::optional<std::filesystem::path>& file,
                             const std::map<std::string, std::string>& cli_overrides,
                             const std::optional<std::string>& env_seed);

std::optional<std::string> seed_from_environment();

}  // namespace asa
