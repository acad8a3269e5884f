#include "asa/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "asa/errors.hpp"

namespace asa {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  T v{};
  in >> v;
  if (!in || !in.eof()) throw UsageError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
  return v;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view content) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    const auto end = std::min(content.find('\n', start), content.size());
    const auto line = trim(content.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + " is not key = value: '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + " has an empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> k = ModelSpec::keys();
  for (const char* extra : {"corpus", "out", "lime_num_samples", "lime_kernel_width", "lime_ridge_penalty",
                            "lime_top_k"}) {
    k.emplace_back(extra);
  }
  return k;
}

void RunConfig::apply(const std::map<std::string, std::string>& values) {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values) {
    if (spec.set(key, value)) continue;
    if (key == "corpus") {
      corpus = value;
    } else if (key == "out") {
      out = value;
    } else if (key == "lime_num_samples") {
      lime.num_samples = parse_number<std::size_t>(key, value);
    } else if (key == "lime_kernel_width") {
      lime.kernel_width = parse_number<double>(key, value);
    } else if (key == "lime_ridge_penalty") {
      lime.ridge_penalty = parse_number<double>(key, value);
    } else if (key == "lime_top_k") {
      lime.top_k = parse_number<std::size_t>(key, value);
    } else {
      unknown.push_back(key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw UsageError(msg);
  }
  lime.seed = spec.seed;
}

std::map<std::string, std::string> RunConfig::to_key_values() const {
  auto kv = spec.to_key_values();
  kv["corpus"] = corpus;
  kv["out"] = out;
  std::ostringstream width, ridge;
  width << lime.kernel_width;
  ridge << lime.ridge_penalty;
  kv["lime_num_samples"] = std::to_string(lime.num_samples);
  kv["lime_kernel_width"] = width.str();
  kv["lime_ridge_penalty"] = ridge.str();
  kv["lime_top_k"] = std::to_string(lime.top_k);
  return kv;
}

RunConfig resolve_run_config(const std::optional<std::filesystem::path>& file,
                             const std::map<std::string, std::string>& cli_overrides,
                             const std::optional<std::string>& env_seed) {
  RunConfig config;
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (!in) throw UsageError("cannot read config file " + file->string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    config.apply(parse_key_values(buffer.str()));
  }
  if (env_seed) config.apply({{"seed", *env_seed}});
  config.apply(cli_overrides);
  config.spec.validate();
  config.lime.validate();
  return config;
}

std::optional<std::string> seed_from_environment() {
  if (const char* v = std::getenv(kSeedEnvVar); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

}  // namespace asa
