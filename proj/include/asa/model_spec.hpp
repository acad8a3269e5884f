#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace asa {

enum class Architecture { kBiLstm, kCnnBiLstm };

/// Regularization block in front of the output layer:
/// ND = dropout then Gaussian noise, N = noise only, D = dropout only.
enum class Setup { kNoiseDropout, kNoise, kDropout };

std::string to_string(Architecture arch);
std::string to_string(Setup setup);
Architecture parse_architecture(std::string_view text);
Setup parse_setup(std::string_view text);

inline bool has_noise(Setup s) { return s != Setup::kDropout; }
inline bool has_final_dropout(Setup s) { return s != Setup::kNoise; }

struct ModelSpec {
  Architecture architecture = Architecture::kCnnBiLstm;
  Setup setup = Setup::kNoiseDropout;
  std::size_t vocab_size = 10000;
  std::size_t embed_dim = 100;
  std::size_t max_len = 128;
  std::size_t hidden = 64;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::vector<std::size_t> dense_sizes = {128, 64, 32, 1};
  double dropout_rate = 0.5;
  double noise_stddev = 0.75;
  std::size_t batch = 64;
  std::size_t epochs = 10;
  double learning_rate = 0.001;
  std::uint64_t seed = 42;

  /// Throws UsageError when a field is out of range.
  void validate() const;

  /// Ordered key -> value text, the same keys accepted by config files.
  std::map<std::string, std::string> to_key_values() const;
  /// Sets one field from its textual form; returns false for unknown keys.
  bool set(std::string_view key, std::string_view value);
  static const std::vector<std::string>& keys();

  /// Field names whose values differ; `ignore_epochs` skips the epoch count.
  std::vector<std::string> differing_fields(const ModelSpec& other, bool ignore_epochs) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Human-readable label such as "CNN-BiLSTM Model_ND".
std::string describe(const ModelSpec& spec);

}  // namespace asa
