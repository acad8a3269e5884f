#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "asa/rng.hpp"
#include "asa/tensor.hpp"

namespace asa::nn {

enum class Mode { kTrain, kInfer };

enum class Activation { kNone, kRelu, kSigmoid };

/// A trainable tensor and its gradient accumulator (same shape).
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}
};

/// Random streams consumed by train-mode stochastic layers.
struct StochasticStreams {
  SeededRng dropout;
  SeededRng noise;

  explicit StochasticStreams(const SeededRng& root)
      : dropout(root.derive("dropout")), noise(root.derive("noise")) {}
};

/// Fixed-length token ids for a batch, row-major [batch x length].
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::int32_t> ids;
};

double sigmoid(double x);

/// Layers operate on a batch: sequences are [batch x time x channels], vectors
/// are [batch x channels]. forward() caches what backward() needs; backward()
/// accumulates into parameter gradients and returns the input gradient.
/// Calling backward() without a preceding forward() throws UsageError.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string name() const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<Param*> params() { return {}; }

  Tensor forward(const Tensor& input);  // inference mode

 protected:
  void require_cache(bool present) const;
};

class Embedding {
 public:
  Embedding(std::size_t rows, std::size_t dim);

  Tensor forward(const TokenBatch& tokens);
  /// Scatter-adds `grad_output` [batch x length x dim] into the table gradient.
  void backward(const Tensor& grad_output);

  Param& table() { return table_; }
  const Param& table() const { return table_; }
  std::size_t rows() const { return table_.value.dim(0); }
  std::size_t dim() const { return table_.value.dim(1); }

 private:
  Param table_;
  TokenBatch cached_;
  bool has_cache_ = false;
};

/// Valid (unpadded) 1-D convolution over time. Kernel is [width x in x filters].
class Conv1D final : public Layer {
 public:
  Conv1D(std::size_t in_channels, std::size_t filters, std::size_t width,
         Activation activation = Activation::kRelu);

  std::string name() const override { return "conv1d"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Param*> params() override { return {&kernel_, &bias_}; }
  using Layer::forward;

  Param& kernel() { return kernel_; }
  Param& bias() { return bias_; }

 private:
  Param kernel_;
  Param bias_;
  Activation activation_;
  Tensor input_;
  Tensor output_;
  bool has_cache_ = false;
};

/// Bidirectional LSTM returning every timestep: [batch x time x 2H], forward
/// direction in the first H channels. Gate order inside W, U, b is
/// input, forget, candidate, output. Initial states are zero.
class BiLstm final : public Layer {
 public:
  BiLstm(std::size_t input_dim, std::size_t hidden);

  std::string name() const override { return "bilstm"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Param*> params() override;
  using Layer::forward;

  std::size_t hidden() const { return hidden_; }

  struct Direction {
    Param w;  // [input x 4H]
    Param u;  // [H x 4H]
    Param b;  // [4H]
    Tensor gates;   // activated gates [batch x time x 4H]
    Tensor cells;   // [batch x time x H]
    Tensor tanh_cells;
    Tensor hidden;  // [batch x time x H]
  };

  Direction& forward_direction() { return fw_; }
  Direction& backward_direction() { return bw_; }

 private:
  void run(Direction& d, bool reverse);
  void backprop(Direction& d, bool reverse, const Tensor& grad_output, std::size_t channel_offset,
                Tensor& grad_input);

  std::size_t input_dim_;
  std::size_t hidden_;
  Direction fw_;
  Direction bw_;
  Tensor input_;
  bool has_cache_ = false;
};

/// Max over time, [batch x time x C] -> [batch x C]. Ties resolve to the
/// earliest timestep, which also receives the gradient.
class GlobalMaxPool final : public Layer {
 public:
  std::string name() const override { return "global_max_pool"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  using Layer::forward;

 private:
  std::vector<std::size_t> argmax_;
  std::size_t batch_ = 0, time_ = 0, channels_ = 0;
  bool has_cache_ = false;
};

/// act(x W + b) with W [in x out].
class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out, Activation activation);

  std::string name() const override { return "dense"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  using Layer::forward;

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  Activation activation() const { return activation_; }

 private:
  Param weight_;
  Param bias_;
  Activation activation_;
  Tensor input_;
  Tensor output_;
  bool has_cache_ = false;
};

/// Inverted dropout; identity in inference mode.
class Dropout final : public Layer {
 public:
  explicit Dropout(double rate);

  std::string name() const override { return "dropout"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  using Layer::forward;

  double rate() const { return rate_; }

 private:
  double rate_;
  std::vector<double> scale_;  // empty when the last forward was the identity
  bool has_cache_ = false;
};

/// Additive zero-mean Gaussian noise in training; identity in inference.
class GaussianNoise final : public Layer {
 public:
  explicit GaussianNoise(double stddev);

  std::string name() const override { return "gaussian_noise"; }
  Tensor forward(const Tensor& input, Mode mode, StochasticStreams& streams) override;
  Tensor backward(const Tensor& grad_output) override;
  using Layer::forward;

  double stddev() const { return stddev_; }

 private:
  double stddev_;
  bool has_cache_ = false;
};

/// Uniform Glorot fill: U(-l, l), l = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, SeededRng& rng);

}  // namespace asa::nn
