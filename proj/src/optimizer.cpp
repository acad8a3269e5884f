#include "asa/optimizer.hpp"

#include <cmath>

#include "asa/errors.hpp"

namespace asa {

AdamState AdamState::for_params(std::span<nn::Param* const> params) {
  AdamState state;
  for (const nn::Param* p : params) {
    state.m.push_back(nn::Tensor::zeros_like(p->value));
    state.v.push_back(nn::Tensor::zeros_like(p->value));
  }
  return state;
}

void adam_step(std::span<nn::Param* const> params, AdamState& state, const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw UsageError("adam state does not match the parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const nn::Param& p = *params[i];
    if (p.grad.shape() != p.value.shape() || state.m[i].shape() != p.value.shape() ||
        state.v[i].shape() != p.value.shape()) {
      throw UsageError("adam: shape mismatch for " + p.name);
    }
    if (!p.grad.all_finite()) {
      std::size_t bad = 0;
      while (bad < p.grad.size() && std::isfinite(p.grad[bad])) ++bad;
      throw NumericError("non-finite gradient in " + p.name + " at element " + std::to_string(bad) +
                         " (value " + std::to_string(p.grad[bad]) + ")");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    nn::Param& p = *params[i];
    double* value = p.value.data();
    const double* grad = p.grad.data();
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      value[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace asa
