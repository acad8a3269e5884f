#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace asa {

struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n) followed by a prefix cut of floor(fraction * n)
/// training indices. Labels are not stratified. Throws UsageError when
/// n < 2 or the fraction is outside (0, 1).
Partition split(std::size_t n, double train_fraction, std::uint64_t seed);

}  // namespace asa
