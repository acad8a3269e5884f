#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "asa/corpus.hpp"
#include "asa/model_spec.hpp"
#include "asa/network.hpp"
#include "asa/optimizer.hpp"

namespace asa {

inline constexpr double kProbabilityClip = 1e-7;
inline constexpr double kDecisionThreshold = 0.5;

/// Binary cross-entropy on a probability clipped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int y);
/// d(bce_loss)/d(logit) for p = sigmoid(logit); zero where the clip is active.
double bce_grad_logit(double p, int y);

inline int predicted_class(double p) { return p >= kDecisionThreshold ? 1 : 0; }

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainOptions {
  /// Overrides spec.epochs when set.
  std::optional<std::size_t> epochs;
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
  nn::Network network;
  AdamState adam;
  std::vector<EpochStats> trace;
  std::size_t epochs_completed = 0;
};

/// Mini-batch Adam on the training split. Batch order for epoch e comes from
/// seed/"shuffle"/e, dropout and noise from seed/"dropout"/e and
/// seed/"noise"/e, so a resumed run reproduces an uninterrupted one.
TrainResult train(const ModelSpec& spec, const LabeledCorpus& corpus, const TrainOptions& options = {});

/// Continues `state` (network + optimizer) from `epochs_completed` up to the
/// target epoch count.
TrainResult resume_training(TrainResult state, const LabeledCorpus& corpus, const TrainOptions& options = {});

/// Positive-class probabilities for the given documents (inference mode).
std::vector<double> predict_documents(nn::Network& network, const LabeledCorpus& corpus,
                                      std::span<const std::size_t> indices, std::size_t batch_size = 64);

/// Binary confusion counts with class 1 as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const;

  static ConfusionMatrix from_predictions(std::span<const int> labels, std::span<const double> probabilities);
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Precision, recall and F1 for `cls` (0 or 1). Empty denominators yield 0.
ClassMetrics class_metrics(const ConfusionMatrix& cm, int cls);

/// (train - test) * 100, in percentage points.
double overfit_percent(double train_accuracy, double test_accuracy);

struct EvalReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class{};  // test split
  double overfit_percent = 0.0;
  ConfusionMatrix train_confusion;
  ConfusionMatrix test_confusion;
};

EvalReport make_report(const ConfusionMatrix& train, const ConfusionMatrix& test);

/// Inference-mode metrics on both splits.
EvalReport evaluate(nn::Network& network, const LabeledCorpus& corpus);

/// `epoch,train_loss,train_acc` with a header row.
void write_trace_csv(std::ostream& out, std::span<const EpochStats> trace);

}  // namespace asa
