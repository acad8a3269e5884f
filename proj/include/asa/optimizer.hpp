#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asa/layers.hpp"

namespace asa {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moments per parameter tensor plus the shared step count.
struct AdamState {
  std::vector<nn::Tensor> m;
  std::vector<nn::Tensor> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::span<nn::Param* const> params);
};

/// Bias-corrected Adam update using each parameter's accumulated gradient.
/// Throws NumericError naming the parameter when any gradient is non-finite;
/// nothing is modified in that case.
void adam_step(std::span<nn::Param* const> params, AdamState& state, const AdamConfig& config);

}  // namespace asa
