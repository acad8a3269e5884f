#include "asa/network.hpp"

#include "asa/errors.hpp"

namespace asa::nn {

TokenBatch make_batch(std::span<const text::EncodedSequence> sequences) {
  TokenBatch batch;
  batch.batch = sequences.size();
  batch.length = sequences.empty() ? 0 : sequences.front().indices.size();
  batch.ids.reserve(batch.batch * batch.length);
  for (const auto& seq : sequences) {
    if (seq.indices.size() != batch.length) throw UsageError("sequences in a batch must share one length");
    batch.ids.insert(batch.ids.end(), seq.indices.begin(), seq.indices.end());
  }
  return batch;
}

Network::Network(const ModelSpec& spec) : spec_(spec) {
  spec_.validate();
  SeededRng init = SeededRng(spec_.seed).derive("init");

  embedding_ = std::make_unique<Embedding>(spec_.vocab_size + 2, spec_.embed_dim);
  glorot_uniform(embedding_->table().value, spec_.vocab_size + 2, spec_.embed_dim, init);

  std::size_t channels = spec_.embed_dim;
  if (spec_.architecture == Architecture::kCnnBiLstm) {
    auto conv = std::make_unique<Conv1D>(channels, spec_.filters, spec_.kernel, Activation::kRelu);
    glorot_uniform(conv->kernel().value, spec_.kernel * channels, spec_.kernel * spec_.filters, init);
    channels = spec_.filters;
    layers_.push_back(std::move(conv));
  }

  auto lstm = std::make_unique<BiLstm>(channels, spec_.hidden);
  for (auto* dir : {&lstm->forward_direction(), &lstm->backward_direction()}) {
    glorot_uniform(dir->w.value, channels, 4 * spec_.hidden, init);
    glorot_uniform(dir->u.value, spec_.hidden, 4 * spec_.hidden, init);
    for (std::size_t j = 0; j < spec_.hidden; ++j) dir->b.value[spec_.hidden + j] = 1.0;
  }
  layers_.push_back(std::move(lstm));
  layers_.push_back(std::make_unique<GlobalMaxPool>());

  channels = 2 * spec_.hidden;
  const std::size_t hidden_layers = spec_.dense_sizes.size() - 1;
  for (std::size_t i = 0; i <= hidden_layers; ++i) {
    const bool is_output = i == hidden_layers;
    const std::size_t units = spec_.dense_sizes[i];
    auto dense = std::make_unique<Dense>(channels, units, is_output ? Activation::kNone : Activation::kRelu);
    glorot_uniform(dense->weight().value, channels, units, init);
    dense->weight().name = "dense_" + std::to_string(i) + ".weight";
    dense->bias().name = "dense_" + std::to_string(i) + ".bias";
    channels = units;
    layers_.push_back(std::move(dense));
    if (is_output) break;
    if (i + 1 < hidden_layers) {
      layers_.push_back(std::make_unique<Dropout>(spec_.dropout_rate));
    } else {
      if (has_final_dropout(spec_.setup)) layers_.push_back(std::make_unique<Dropout>(spec_.dropout_rate));
      if (has_noise(spec_.setup)) layers_.push_back(std::make_unique<GaussianNoise>(spec_.noise_stddev));
    }
  }
}

std::vector<double> Network::forward(const TokenBatch& batch, Mode mode, StochasticStreams& streams) {
  if (batch.length != spec_.max_len) {
    throw UsageError("network expects sequences of length " + std::to_string(spec_.max_len) + ", got " +
                     std::to_string(batch.length));
  }
  Tensor x = embedding_->forward(batch);
  for (auto& layer : layers_) x = layer->forward(x, mode, streams);
  probabilities_.resize(batch.batch);
  for (std::size_t i = 0; i < batch.batch; ++i) probabilities_[i] = sigmoid(x[i]);
  has_forward_ = true;
  return probabilities_;
}

std::vector<double> Network::predict(const TokenBatch& batch) {
  StochasticStreams unused{SeededRng(0)};
  return forward(batch, Mode::kInfer, unused);
}

void Network::backward_logits(std::span<const double> grad_logits) {
  if (!has_forward_) throw UsageError("network: backward called without a preceding forward");
  if (grad_logits.size() != probabilities_.size()) {
    throw UsageError("network backward expects one gradient per sequence");
  }
  Tensor g({grad_logits.size(), 1}, std::vector<double>(grad_logits.begin(), grad_logits.end()));
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  embedding_->backward(g);
  has_forward_ = false;
}

void Network::backward(std::span<const double> grad_probabilities) {
  if (!has_forward_) throw UsageError("network: backward called without a preceding forward");
  std::vector<double> grad_logits(grad_probabilities.size());
  for (std::size_t i = 0; i < grad_logits.size() && i < probabilities_.size(); ++i) {
    grad_logits[i] = grad_probabilities[i] * probabilities_[i] * (1.0 - probabilities_[i]);
  }
  backward_logits(grad_logits);
}

void Network::zero_grad() {
  for (Param* p : parameters()) p->grad.fill(0.0);
}

std::vector<Param*> Network::parameters() {
  std::vector<Param*> out{&embedding_->table()};
  for (auto& layer : layers_) {
    for (Param* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::vector<const Param*> Network::parameters() const {
  auto mutable_params = const_cast<Network*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Param* p : parameters()) n += p->value.size();
  return n;
}

std::vector<std::string> Network::layer_names() const {
  std::vector<std::string> out{"embedding"};
  for (const auto& layer : layers_) out.push_back(layer->name());
  return out;
}

}  // namespace asa::nn
