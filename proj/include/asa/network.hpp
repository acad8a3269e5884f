#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "asa/layers.hpp"
#include "asa/model_spec.hpp"
#include "asa/text_pipeline.hpp"

namespace asa::nn {

TokenBatch make_batch(std::span<const text::EncodedSequence> sequences);

/// Embedding -> [Conv1D+ReLU] -> BiLSTM -> GlobalMaxPool -> hidden Dense+ReLU
/// layers (dropout after each but the last) -> setup block -> Dense(1) ->
/// sigmoid. The setup block is dropout+noise (ND), noise (N) or dropout (D).
///
/// An instance caches activations between forward() and backward(), so it
/// must not be shared between threads.
class Network {
 public:
  /// Builds the layer stack and initializes parameters from the spec seed.
  explicit Network(const ModelSpec& spec);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const ModelSpec& spec() const noexcept { return spec_; }
  /// Resumed runs record the new target epoch count.
  void set_epochs(std::size_t epochs) noexcept { spec_.epochs = epochs; }

  /// Positive-class probabilities, one per sequence.
  std::vector<double> forward(const TokenBatch& batch, Mode mode, StochasticStreams& streams);
  std::vector<double> predict(const TokenBatch& batch);

  /// Backpropagates d(loss)/d(logit) per sequence and accumulates gradients.
  void backward_logits(std::span<const double> grad_logits);
  /// Same, starting from d(loss)/d(probability).
  void backward(std::span<const double> grad_probabilities);

  void zero_grad();

  std::vector<Param*> parameters();
  std::vector<const Param*> parameters() const;
  std::size_t parameter_count() const;

  /// Layer kinds in execution order, e.g. "embedding", "conv1d", ...
  std::vector<std::string> layer_names() const;

 private:
  ModelSpec spec_;
  std::unique_ptr<Embedding> embedding_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<double> probabilities_;
  bool has_forward_ = false;
};

}  // namespace asa::nn
