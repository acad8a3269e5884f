#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace asa {

/// Seeded pseudo-random stream (mt19937_64). Independent streams are derived
/// from a root seed by sub-key; the keys used across the project are
///   "init"    parameter initialization
///   "dropout" dropout masks during training
///   "noise"   Gaussian-noise samples during training
///   "shuffle" per-epoch batch order
///   "split"   train/test partition
///   "balance" class down-sampling at ingest
///   "lime"    perturbation sampling for explanations
///   "synth"   synthetic corpus generation
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream keyed by name; does not advance this stream.
  SeededRng derive(std::string_view subkey) const;
  /// Child stream keyed by an integer (epoch, document index, ...).
  SeededRng derive(std::uint64_t subkey) const;

  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key);
std::uint64_t hash_key(std::string_view key);

}  // namespace asa
