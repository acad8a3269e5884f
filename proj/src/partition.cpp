#include "asa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asa/errors.hpp"
#include "asa/rng.hpp"

namespace asa {

Partition split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (n < 2) throw UsageError("cannot split fewer than 2 documents");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw UsageError("train_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng = SeededRng(seed).derive("split");
  std::shuffle(order.begin(), order.end(), rng.engine());
  // 1e-9 absorbs products such as 0.29 * 100 that land just below an integer.
  const auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
  Partition p;
  p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return p;
}

}  // namespace asa
