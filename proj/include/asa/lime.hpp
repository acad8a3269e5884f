#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asa/rng.hpp"

namespace asa::lime {

/// Binary presence vector over a review's distinct tokens.
using Mask = std::vector<std::uint8_t>;

/// Black-box scorer: texts in, positive-class probabilities out.
using Classifier = std::function<std::vector<double>(const std::vector<std::string>& texts)>;

/// Bag-of-distinct-words view of one review. Masking a feature removes every
/// occurrence of that token.
struct InterpretableInstance {
  std::vector<std::string> tokens;           // normalized review, original order
  std::vector<std::string> distinct_tokens;  // first-occurrence order
  std::vector<std::size_t> feature_of;       // token position -> feature index

  static InterpretableInstance from_text(std::string_view raw);

  std::size_t feature_count() const { return distinct_tokens.size(); }
  /// Space-joined tokens whose feature is present.
  std::string reconstruct(std::span<const std::uint8_t> presence) const;
};

struct LimeConfig {
  std::size_t num_samples = 1000;
  double kernel_width = 25.0;
  double ridge_penalty = 1.0;
  std::size_t top_k = 10;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Perturbation {
  Mask mask;
  std::string text;
};

/// num_samples perturbations; sample 0 is the unmasked review. Every other
/// sample masks k distinct features with k uniform in {0, ..., n-1}.
/// Throws CannotExplainError when the instance has no tokens.
std::vector<Perturbation> perturb(const InterpretableInstance& instance, const LimeConfig& config, SeededRng& rng);

/// Cosine distance between binary vectors; an all-zero vector is at distance 1.
double cosine_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// exp(-D^2 / width^2) with D the cosine distance.
double proximity(std::span<const std::uint8_t> original, std::span<const std::uint8_t> perturbed,
                 double kernel_width);

struct SurrogateFit {
  std::vector<std::size_t> features;  // selected, ordered by |coefficient| descending
  std::vector<double> coefficients;   // parallel to features
  double intercept = 0.0;
  double local_fidelity = 0.0;        // weighted R^2 on the perturbation set
};

/// Weighted ridge regression with an unpenalized intercept. A preliminary
/// fit on all features picks the top_k by |coefficient|; the reported model
/// is refit on that subset. Throws RankDeficientError when the normal
/// equations are singular (possible only with ridge_penalty == 0).
SurrogateFit fit_surrogate(const std::vector<Mask>& samples, std::span<const double> labels,
                           std::span<const double> weights, const LimeConfig& config);

/// Weighted ridge fit on an explicit feature subset (no selection).
SurrogateFit fit_weighted_ridge(const std::vector<Mask>& samples, std::span<const double> labels,
                                std::span<const double> weights, std::span<const std::size_t> features,
                                double ridge_penalty);

struct TokenWeight {
  std::string token;
  double weight = 0.0;  // toward the positive class

  friend bool operator==(const TokenWeight&, const TokenWeight&) = default;
};

struct Explanation {
  std::string review_id;
  std::string text;  // normalized review
  std::vector<TokenWeight> token_weights;
  double intercept = 0.0;
  double local_fidelity = 0.0;
  double p_negative = 0.0;
  double p_positive = 0.0;
  std::size_t feature_count = 0;
  LimeConfig config;
};

/// End-to-end explanation of one review against a black-box classifier.
Explanation explain(std::string_view review, const Classifier& classifier, const LimeConfig& config,
                    std::string review_id = {});

/// Structured JSON record; stable key order and number formatting.
std::string to_json(const Explanation& explanation);
Explanation from_json(std::string_view json_text);

}  // namespace asa::lime
