#include "asa/training.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "asa/errors.hpp"

namespace asa {

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

double bce_grad_logit(double p, int y) {
  if (p < kProbabilityClip || p > 1.0 - kProbabilityClip) return 0.0;
  return p - static_cast<double>(y);
}

namespace {

void check_vocabulary_fits(const ModelSpec& spec, const LabeledCorpus& corpus) {
  if (corpus.vocabulary.size() > spec.vocab_size) {
    throw UsageError("corpus vocabulary has " + std::to_string(corpus.vocabulary.size()) +
                     " tokens but the model spec allows " + std::to_string(spec.vocab_size));
  }
  if (corpus.max_len != spec.max_len) {
    throw UsageError("corpus max_len " + std::to_string(corpus.max_len) + " differs from model max_len " +
                     std::to_string(spec.max_len));
  }
}

EpochStats run_epoch(nn::Network& network, AdamState& adam, const LabeledCorpus& corpus, std::size_t epoch) {
  const ModelSpec& spec = network.spec();
  const SeededRng root(spec.seed);
  SeededRng shuffle = root.derive("shuffle").derive(epoch);
  nn::StochasticStreams streams{root};
  streams.dropout = root.derive("dropout").derive(epoch);
  streams.noise = root.derive("noise").derive(epoch);

  std::vector<std::size_t> order = corpus.train;
  std::shuffle(order.begin(), order.end(), shuffle.engine());

  const AdamConfig config{spec.learning_rate};
  auto params = network.parameters();
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::vector<text::EncodedSequence> sequences;
  for (std::size_t start = 0; start < order.size(); start += spec.batch) {
    const std::size_t end = std::min(order.size(), start + spec.batch);
    const std::span<const std::size_t> ids(order.data() + start, end - start);
    sequences = corpus.sequences(ids);
    const auto labels = corpus.labels(ids);
    network.zero_grad();
    const auto probs = network.forward(nn::make_batch(sequences), nn::Mode::kTrain, streams);
    std::vector<double> grad(probs.size());
    const double scale = 1.0 / static_cast<double>(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!std::isfinite(probs[i])) throw NumericError("non-finite network output in epoch " + std::to_string(epoch));
      loss_sum += bce_loss(probs[i], labels[i]);
      correct += predicted_class(probs[i]) == labels[i] ? 1 : 0;
      grad[i] = bce_grad_logit(probs[i], labels[i]) * scale;
    }
    network.backward_logits(grad);
    adam_step(params, adam, config);
  }
  const double n = static_cast<double>(order.size());
  return {epoch, loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace

TrainResult resume_training(TrainResult state, const LabeledCorpus& corpus, const TrainOptions& options) {
  const ModelSpec& spec = state.network.spec();
  check_vocabulary_fits(spec, corpus);
  if (corpus.train.empty()) throw UsageError("training split is empty");
  const std::size_t target = options.epochs.value_or(spec.epochs);
  for (std::size_t epoch = state.epochs_completed + 1; epoch <= target; ++epoch) {
    EpochStats stats = run_epoch(state.network, state.adam, corpus, epoch);
    state.trace.push_back(stats);
    state.epochs_completed = epoch;
    if (options.on_epoch) options.on_epoch(stats);
  }
  return state;
}

TrainResult train(const ModelSpec& spec, const LabeledCorpus& corpus, const TrainOptions& options) {
  check_vocabulary_fits(spec, corpus);
  if (corpus.train.empty()) throw UsageError("training split is empty");
  nn::Network network(spec);
  auto params = network.parameters();
  AdamState adam = AdamState::for_params(params);
  return resume_training(TrainResult{std::move(network), std::move(adam), {}, 0}, corpus, options);
}

std::vector<double> predict_documents(nn::Network& network, const LabeledCorpus& corpus,
                                      std::span<const std::size_t> indices, std::size_t batch_size) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const std::size_t end = std::min(indices.size(), start + batch_size);
    const auto sequences = corpus.sequences(indices.subspan(start, end - start));
    const auto probs = network.predict(nn::make_batch(sequences));
    out.insert(out.end(), probs.begin(), probs.end());
  }
  return out;
}

double ConfusionMatrix::accuracy() const {
  return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
}

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const int> labels, std::span<const double> probabilities) {
  if (labels.size() != probabilities.size()) throw UsageError("labels and predictions differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int predicted = predicted_class(probabilities[i]);
    if (predicted == 1) {
      (labels[i] == 1 ? cm.tp : cm.fp) += 1;
    } else {
      (labels[i] == 0 ? cm.tn : cm.fn) += 1;
    }
  }
  return cm;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, int cls) {
  // For class 0 the roles of positive and negative swap.
  const double hit = cls == 1 ? static_cast<double>(cm.tp) : static_cast<double>(cm.tn);
  const double false_alarm = cls == 1 ? static_cast<double>(cm.fp) : static_cast<double>(cm.fn);
  const double miss = cls == 1 ? static_cast<double>(cm.fn) : static_cast<double>(cm.fp);
  ClassMetrics m;
  m.support = static_cast<std::size_t>(hit + miss);
  m.precision = hit + false_alarm > 0 ? hit / (hit + false_alarm) : 0.0;
  m.recall = hit + miss > 0 ? hit / (hit + miss) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

double overfit_percent(double train_accuracy, double test_accuracy) {
  return (train_accuracy - test_accuracy) * 100.0;
}

EvalReport make_report(const ConfusionMatrix& train, const ConfusionMatrix& test) {
  EvalReport r;
  r.train_confusion = train;
  r.test_confusion = test;
  r.train_accuracy = train.accuracy();
  r.test_accuracy = test.accuracy();
  r.per_class = {class_metrics(test, 0), class_metrics(test, 1)};
  r.overfit_percent = overfit_percent(r.train_accuracy, r.test_accuracy);
  return r;
}

EvalReport evaluate(nn::Network& network, const LabeledCorpus& corpus) {
  check_vocabulary_fits(network.spec(), corpus);
  const auto train_probs = predict_documents(network, corpus, corpus.train);
  const auto test_probs = predict_documents(network, corpus, corpus.test);
  const auto train_labels = corpus.labels(corpus.train);
  const auto test_labels = corpus.labels(corpus.test);
  return make_report(ConfusionMatrix::from_predictions(train_labels, train_probs),
                     ConfusionMatrix::from_predictions(test_labels, test_probs));
}

void write_trace_csv(std::ostream& out, std::span<const EpochStats> trace) {
  out << "epoch,train_loss,train_acc\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  for (const auto& e : trace) out << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace asa
