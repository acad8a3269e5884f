#include "asa/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>

#include "asa/errors.hpp"

namespace asa::nn {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void activate(std::span<double> values, Activation act) {
  switch (act) {
    case Activation::kNone:
      break;
    case Activation::kRelu:
      for (double& v : values) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::kSigmoid:
      for (double& v : values) v = sigmoid(v);
      break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the activated output.
void activation_backward(std::span<double> grad, std::span<const double> output, Activation act) {
  switch (act) {
    case Activation::kNone:
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(output[i] > 0.0)) grad[i] = 0.0;
      }
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= output[i] * (1.0 - output[i]);
      break;
  }
}

// Vectorized logistic and tanh over contiguous blocks (both via exp).
void sigmoid_block(double* x, std::size_t n) {
  Eigen::Map<Eigen::ArrayXd> a(x, static_cast<Eigen::Index>(n));
  a = 1.0 / (1.0 + (-a).exp());
}

void tanh_block(double* x, std::size_t n) {
  Eigen::Map<Eigen::ArrayXd> a(x, static_cast<Eigen::Index>(n));
  a = 2.0 / (1.0 + (-2.0 * a).exp()) - 1.0;
}

void add_bias_rows(double* out, std::size_t rows, const Tensor& bias) {
  const std::size_t cols = bias.size();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += bias[c];
  }
}

void accumulate_column_sums(Tensor& grad_bias, const double* rows_data, std::size_t rows) {
  const std::size_t cols = grad_bias.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = rows_data + r * cols;
    for (std::size_t c = 0; c < cols; ++c) grad_bias[c] += row[c];
  }
}

void require_shape(const Tensor& t, std::size_t rank, const char* layer) {
  if (t.rank() != rank) {
    throw UsageError(std::string(layer) + " expects a rank-" + std::to_string(rank) +
                     " input, got " + shape_to_string(t.shape()));
  }
}

void require_same_shape(const Tensor& grad, const Tensor::Shape& expected, const char* layer) {
  if (grad.shape() != expected) {
    throw UsageError(std::string(layer) + " backward expects gradient of shape " +
                     shape_to_string(expected) + ", got " + shape_to_string(grad.shape()));
  }
}

}  // namespace

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, SeededRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

Tensor Layer::forward(const Tensor& input) {
  StochasticStreams unused{SeededRng(0)};
  return forward(input, Mode::kInfer, unused);
}

void Layer::require_cache(bool present) const {
  if (!present) throw UsageError(name() + ": backward called without a preceding forward");
}

// ---------------------------------------------------------------------------
// Embedding

Embedding::Embedding(std::size_t rows, std::size_t dim) : table_("embedding.table", Tensor({rows, dim})) {}

Tensor Embedding::forward(const TokenBatch& tokens) {
  if (tokens.ids.size() != tokens.batch * tokens.length) {
    throw UsageError("token batch holds " + std::to_string(tokens.ids.size()) + " ids, expected " +
                     std::to_string(tokens.batch * tokens.length));
  }
  const std::size_t d = dim();
  Tensor out({tokens.batch, tokens.length, d});
  for (std::size_t i = 0; i < tokens.ids.size(); ++i) {
    const std::int32_t id = tokens.ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= rows()) {
      throw DataError("token index " + std::to_string(id) + " outside embedding table of " +
                      std::to_string(rows()) + " rows");
    }
    std::memcpy(out.data() + i * d, table_.value.data() + static_cast<std::size_t>(id) * d,
                d * sizeof(double));
  }
  cached_ = tokens;
  has_cache_ = true;
  return out;
}

void Embedding::backward(const Tensor& grad_output) {
  if (!has_cache_) throw UsageError("embedding: backward called without a preceding forward");
  require_same_shape(grad_output, {cached_.batch, cached_.length, dim()}, "embedding");
  const std::size_t d = dim();
  for (std::size_t i = 0; i < cached_.ids.size(); ++i) {
    double* row = table_.grad.data() + static_cast<std::size_t>(cached_.ids[i]) * d;
    const double* g = grad_output.data() + i * d;
    for (std::size_t k = 0; k < d; ++k) row[k] += g[k];
  }
  has_cache_ = false;
}

// ---------------------------------------------------------------------------
// Conv1D

Conv1D::Conv1D(std::size_t in_channels, std::size_t filters, std::size_t width, Activation activation)
    : kernel_("conv1d.kernel", Tensor({width, in_channels, filters})),
      bias_("conv1d.bias", Tensor({filters})),
      activation_(activation) {}

Tensor Conv1D::forward(const Tensor& input, Mode, StochasticStreams&) {
  require_shape(input, 3, "conv1d");
  const std::size_t width = kernel_.value.dim(0);
  const std::size_t channels = kernel_.value.dim(1);
  const std::size_t filters = kernel_.value.dim(2);
  const std::size_t batch = input.dim(0);
  const std::size_t time = input.dim(1);
  if (input.dim(2) != channels) {
    throw UsageError("conv1d expects " + std::to_string(channels) + " input channels, got " +
                     std::to_string(input.dim(2)));
  }
  if (time < width) {
    throw SequenceTooShortError("conv1d needs at least " + std::to_string(width) +
                                " timesteps, got " + std::to_string(time));
  }
  const std::size_t out_time = time - width + 1;
  Tensor out({batch, out_time, filters});
  const MatrixView kernel = view(kernel_.value.data(), width * channels, filters);
  for (std::size_t b = 0; b < batch; ++b) {
    // Window t covers rows t..t+width-1, which are contiguous in memory.
    const MatrixView windows{input.data() + b * time * channels, out_time, width * channels, channels};
    gemm(mutable_view(out.data() + b * out_time * filters, out_time, filters), windows, kernel, false);
  }
  add_bias_rows(out.data(), batch * out_time, bias_.value);
  activate(out.values(), activation_);
  input_ = input;
  output_ = out;
  has_cache_ = true;
  return out;
}

Tensor Conv1D::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  require_same_shape(grad_output, output_.shape(), "conv1d");
  const std::size_t width = kernel_.value.dim(0);
  const std::size_t channels = kernel_.value.dim(1);
  const std::size_t filters = kernel_.value.dim(2);
  const std::size_t batch = input_.dim(0);
  const std::size_t time = input_.dim(1);
  const std::size_t out_time = output_.dim(1);

  Tensor dz = grad_output;
  activation_backward(dz.values(), output_.values(), activation_);
  accumulate_column_sums(bias_.grad, dz.data(), batch * out_time);

  Tensor grad_input({batch, time, channels});
  const MatrixView kernel = view(kernel_.value.data(), width * channels, filters);
  Tensor window_grad({out_time, width * channels});
  for (std::size_t b = 0; b < batch; ++b) {
    const MatrixView windows{input_.data() + b * time * channels, out_time, width * channels, channels};
    const MatrixView dz_b = view(dz.data() + b * out_time * filters, out_time, filters);
    gemm(mutable_view(kernel_.grad.data(), width * channels, filters), windows.t(), dz_b, true);
    gemm(mutable_view(window_grad.data(), out_time, width * channels), dz_b, kernel.t(), false);
    double* gi = grad_input.data() + b * time * channels;
    for (std::size_t t = 0; t < out_time; ++t) {
      const double* src = window_grad.data() + t * width * channels;
      double* dst = gi + t * channels;
      for (std::size_t k = 0; k < width * channels; ++k) dst[k] += src[k];
    }
  }
  has_cache_ = false;
  return grad_input;
}

// ---------------------------------------------------------------------------
// BiLstm

BiLstm::BiLstm(std::size_t input_dim, std::size_t hidden)
    : input_dim_(input_dim),
      hidden_(hidden),
      fw_{Param("bilstm.forward.w", Tensor({input_dim, 4 * hidden})),
          Param("bilstm.forward.u", Tensor({hidden, 4 * hidden})),
          Param("bilstm.forward.b", Tensor({4 * hidden})), {}, {}, {}, {}},
      bw_{Param("bilstm.backward.w", Tensor({input_dim, 4 * hidden})),
          Param("bilstm.backward.u", Tensor({hidden, 4 * hidden})),
          Param("bilstm.backward.b", Tensor({4 * hidden})), {}, {}, {}, {}} {}

std::vector<Param*> BiLstm::params() {
  return {&fw_.w, &fw_.u, &fw_.b, &bw_.w, &bw_.u, &bw_.b};
}

void BiLstm::run(Direction& d, bool reverse) {
  const std::size_t batch = input_.dim(0);
  const std::size_t time = input_.dim(1);
  const std::size_t h = hidden_;
  const std::size_t g4 = 4 * h;

  d.gates = Tensor({batch, time, g4});
  d.cells = Tensor({batch, time, h});
  d.tanh_cells = Tensor({batch, time, h});
  d.hidden = Tensor({batch, time, h});

  gemm(mutable_view(d.gates.data(), batch * time, g4), view(input_.data(), batch * time, input_dim_),
       view(d.w.value.data(), input_dim_, g4), false);
  add_bias_rows(d.gates.data(), batch * time, d.b.value);

  const MatrixView u = view(d.u.value.data(), h, g4);
  for (std::size_t s = 0; s < time; ++s) {
    const std::size_t t = reverse ? time - 1 - s : s;
    const std::size_t prev = reverse ? t + 1 : t - 1;  // valid only when s > 0
    if (s > 0) {
      gemm(MutableMatrixView{d.gates.data() + t * g4, batch, g4, time * g4},
           MatrixView{d.hidden.data() + prev * h, batch, h, time * h}, u, true);
    }
    for (std::size_t b = 0; b < batch; ++b) {
      double* g = d.gates.data() + (b * time + t) * g4;
      const double* c_prev = s > 0 ? d.cells.data() + (b * time + prev) * h : nullptr;
      double* c = d.cells.data() + (b * time + t) * h;
      double* tc = d.tanh_cells.data() + (b * time + t) * h;
      double* hh = d.hidden.data() + (b * time + t) * h;
      sigmoid_block(g, 2 * h);
      tanh_block(g + 2 * h, h);
      sigmoid_block(g + 3 * h, h);
      for (std::size_t j = 0; j < h; ++j) {
        c[j] = (c_prev ? g[h + j] * c_prev[j] : 0.0) + g[j] * g[2 * h + j];
        tc[j] = c[j];
      }
      tanh_block(tc, h);
      for (std::size_t j = 0; j < h; ++j) hh[j] = g[3 * h + j] * tc[j];
    }
  }
}

Tensor BiLstm::forward(const Tensor& input, Mode, StochasticStreams&) {
  require_shape(input, 3, "bilstm");
  if (input.dim(2) != input_dim_) {
    throw UsageError("bilstm expects " + std::to_string(input_dim_) + " input channels, got " +
                     std::to_string(input.dim(2)));
  }
  input_ = input;
  run(fw_, false);
  run(bw_, true);
  const std::size_t batch = input.dim(0);
  const std::size_t time = input.dim(1);
  const std::size_t h = hidden_;
  Tensor out({batch, time, 2 * h});
  for (std::size_t r = 0; r < batch * time; ++r) {
    std::memcpy(out.data() + r * 2 * h, fw_.hidden.data() + r * h, h * sizeof(double));
    std::memcpy(out.data() + r * 2 * h + h, bw_.hidden.data() + r * h, h * sizeof(double));
  }
  has_cache_ = true;
  return out;
}

void BiLstm::backprop(Direction& d, bool reverse, const Tensor& grad_output, std::size_t channel_offset,
                      Tensor& grad_input) {
  const std::size_t batch = input_.dim(0);
  const std::size_t time = input_.dim(1);
  const std::size_t h = hidden_;
  const std::size_t g4 = 4 * h;

  Tensor dgates({batch, time, g4});
  Tensor dh_next({batch, h});
  Tensor dc_next({batch, h});
  const MatrixView u = view(d.u.value.data(), h, g4);

  for (std::size_t step = time; step-- > 0;) {
    const std::size_t t = reverse ? time - 1 - step : step;
    const std::size_t prev = reverse ? t + 1 : t - 1;  // valid only when step > 0
    for (std::size_t b = 0; b < batch; ++b) {
      const double* g = d.gates.data() + (b * time + t) * g4;
      const double* tc = d.tanh_cells.data() + (b * time + t) * h;
      const double* c_prev = step > 0 ? d.cells.data() + (b * time + prev) * h : nullptr;
      const double* go = grad_output.data() + (b * time + t) * 2 * h + channel_offset;
      double* dg = dgates.data() + (b * time + t) * g4;
      for (std::size_t j = 0; j < h; ++j) {
        const double ig = g[j], fg = g[h + j], cand = g[2 * h + j], og = g[3 * h + j];
        const double dh = go[j] + dh_next[b * h + j];
        const double dc = dc_next[b * h + j] + dh * og * (1.0 - tc[j] * tc[j]);
        const double cp = c_prev ? c_prev[j] : 0.0;
        dg[j] = dc * cand * ig * (1.0 - ig);
        dg[h + j] = dc * cp * fg * (1.0 - fg);
        dg[2 * h + j] = dc * ig * (1.0 - cand * cand);
        dg[3 * h + j] = dh * tc[j] * og * (1.0 - og);
        dc_next[b * h + j] = dc * fg;
      }
    }
    if (step > 0) {
      gemm(mutable_view(dh_next.data(), batch, h),
           MatrixView{dgates.data() + t * g4, batch, g4, time * g4}, u.t(), false);
    }
  }

  gemm(mutable_view(d.w.grad.data(), input_dim_, g4), view(input_.data(), batch * time, input_dim_).t(),
       view(dgates.data(), batch * time, g4), true);
  accumulate_column_sums(d.b.grad, dgates.data(), batch * time);
  if (time > 1) {
    for (std::size_t b = 0; b < batch; ++b) {
      // Pair each step's gate gradient with the hidden state that fed it.
      const double* h_prev = d.hidden.data() + (b * time + (reverse ? 1 : 0)) * h;
      const double* dg = dgates.data() + (b * time + (reverse ? 0 : 1)) * g4;
      gemm(mutable_view(d.u.grad.data(), h, g4), view(h_prev, time - 1, h).t(), view(dg, time - 1, g4),
           true);
    }
  }
  gemm(mutable_view(grad_input.data(), batch * time, input_dim_), view(dgates.data(), batch * time, g4),
       view(d.w.value.data(), input_dim_, g4).t(), true);
}

Tensor BiLstm::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  require_same_shape(grad_output, {input_.dim(0), input_.dim(1), 2 * hidden_}, "bilstm");
  Tensor grad_input({input_.dim(0), input_.dim(1), input_dim_});
  backprop(fw_, false, grad_output, 0, grad_input);
  backprop(bw_, true, grad_output, hidden_, grad_input);
  has_cache_ = false;
  return grad_input;
}

// ---------------------------------------------------------------------------
// GlobalMaxPool

Tensor GlobalMaxPool::forward(const Tensor& input, Mode, StochasticStreams&) {
  require_shape(input, 3, "global_max_pool");
  batch_ = input.dim(0);
  time_ = input.dim(1);
  channels_ = input.dim(2);
  if (time_ == 0) throw UsageError("global_max_pool needs at least one timestep");
  Tensor out({batch_, channels_});
  argmax_.assign(batch_ * channels_, 0);
  for (std::size_t b = 0; b < batch_; ++b) {
    for (std::size_t c = 0; c < channels_; ++c) {
      std::size_t best = 0;
      double value = input.at(b, 0, c);
      for (std::size_t t = 1; t < time_; ++t) {
        const double v = input.at(b, t, c);
        if (v > value) {
          value = v;
          best = t;
        }
      }
      out.at(b, c) = value;
      argmax_[b * channels_ + c] = best;
    }
  }
  has_cache_ = true;
  return out;
}

Tensor GlobalMaxPool::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  require_same_shape(grad_output, {batch_, channels_}, "global_max_pool");
  Tensor grad_input({batch_, time_, channels_});
  for (std::size_t b = 0; b < batch_; ++b) {
    for (std::size_t c = 0; c < channels_; ++c) {
      grad_input.at(b, argmax_[b * channels_ + c], c) += grad_output.at(b, c);
    }
  }
  has_cache_ = false;
  return grad_input;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(std::size_t in, std::size_t out, Activation activation)
    : weight_("dense.weight", Tensor({in, out})), bias_("dense.bias", Tensor({out})), activation_(activation) {}

Tensor Dense::forward(const Tensor& input, Mode, StochasticStreams&) {
  require_shape(input, 2, "dense");
  const std::size_t in = weight_.value.dim(0);
  const std::size_t out_dim = weight_.value.dim(1);
  if (input.dim(1) != in) {
    throw UsageError("dense expects " + std::to_string(in) + " inputs, got " + std::to_string(input.dim(1)));
  }
  const std::size_t batch = input.dim(0);
  Tensor out({batch, out_dim});
  gemm(mutable_view(out.data(), batch, out_dim), view(input.data(), batch, in),
       view(weight_.value.data(), in, out_dim), false);
  add_bias_rows(out.data(), batch, bias_.value);
  activate(out.values(), activation_);
  input_ = input;
  output_ = out;
  has_cache_ = true;
  return out;
}

Tensor Dense::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  require_same_shape(grad_output, output_.shape(), "dense");
  const std::size_t in = weight_.value.dim(0);
  const std::size_t out_dim = weight_.value.dim(1);
  const std::size_t batch = input_.dim(0);
  Tensor dz = grad_output;
  activation_backward(dz.values(), output_.values(), activation_);
  gemm(mutable_view(weight_.grad.data(), in, out_dim), view(input_.data(), batch, in).t(),
       view(dz.data(), batch, out_dim), true);
  accumulate_column_sums(bias_.grad, dz.data(), batch);
  Tensor grad_input({batch, in});
  gemm(mutable_view(grad_input.data(), batch, in), view(dz.data(), batch, out_dim),
       view(weight_.value.data(), in, out_dim).t(), false);
  has_cache_ = false;
  return grad_input;
}

// ---------------------------------------------------------------------------
// Dropout / GaussianNoise

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must be in [0, 1)");
}

Tensor Dropout::forward(const Tensor& input, Mode mode, StochasticStreams& streams) {
  has_cache_ = true;
  scale_.clear();
  if (mode == Mode::kInfer || rate_ == 0.0) return input;
  const double keep_scale = 1.0 / (1.0 - rate_);
  Tensor out = input;
  scale_.resize(input.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    scale_[i] = streams.dropout.uniform() < rate_ ? 0.0 : keep_scale;
    out[i] *= scale_[i];
  }
  return out;
}

Tensor Dropout::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  has_cache_ = false;
  if (scale_.empty()) return grad_output;
  if (grad_output.size() != scale_.size()) throw UsageError("dropout backward shape mismatch");
  Tensor grad = grad_output;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= scale_[i];
  return grad;
}

GaussianNoise::GaussianNoise(double stddev) : stddev_(stddev) {
  if (!(stddev >= 0.0)) throw UsageError("noise stddev must be >= 0");
}

Tensor GaussianNoise::forward(const Tensor& input, Mode mode, StochasticStreams& streams) {
  has_cache_ = true;
  if (mode == Mode::kInfer || stddev_ == 0.0) return input;
  Tensor out = input;
  for (double& v : out.values()) v += stddev_ * streams.noise.normal();
  return out;
}

Tensor GaussianNoise::backward(const Tensor& grad_output) {
  require_cache(has_cache_);
  has_cache_ = false;
  return grad_output;
}

}  // namespace asa::nn
