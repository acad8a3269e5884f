#include "asa/lime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

#include "asa/errors.hpp"
#include "asa/text_pipeline.hpp"

namespace asa::lime {

InterpretableInstance InterpretableInstance::from_text(std::string_view raw) {
  InterpretableInstance inst;
  inst.tokens = text::tokenize(text::normalize(raw));
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& token : inst.tokens) {
    auto [it, inserted] = seen.try_emplace(token, inst.distinct_tokens.size());
    if (inserted) inst.distinct_tokens.push_back(token);
    inst.feature_of.push_back(it->second);
  }
  return inst;
}

std::string InterpretableInstance::reconstruct(std::span<const std::uint8_t> presence) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!presence[feature_of[i]]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

void LimeConfig::validate() const {
  if (num_samples < 1) throw UsageError("num_samples must be >= 1");
  if (!(kernel_width > 0.0)) throw UsageError("kernel width must be > 0");
  if (!(ridge_penalty >= 0.0)) throw UsageError("ridge penalty must be >= 0");
  if (top_k < 1) throw UsageError("top_k must be >= 1");
}

std::vector<Perturbation> perturb(const InterpretableInstance& instance, const LimeConfig& config, SeededRng& rng) {
  config.validate();
  const std::size_t n = instance.feature_count();
  if (n == 0) throw CannotExplainError("review has no tokens after preprocessing");
  std::vector<Perturbation> out;
  out.reserve(config.num_samples);
  const Mask all(n, 1);
  out.push_back({all, instance.reconstruct(all)});
  std::vector<std::size_t> positions(n);
  for (std::size_t s = 1; s < config.num_samples; ++s) {
    const std::size_t masked = rng.below(n);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    Mask mask = all;
    // Partial Fisher-Yates: the first `masked` slots are a uniform subset.
    for (std::size_t i = 0; i < masked; ++i) {
      const std::size_t j = i + rng.below(n - i);
      std::swap(positions[i], positions[j]);
      mask[positions[i]] = 0;
    }
    std::string text = instance.reconstruct(mask);
    out.push_back({std::move(mask), std::move(text)});
  }
  return out;
}

double cosine_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw UsageError("cosine distance needs vectors of equal length");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i] && b[i]);
    na += static_cast<double>(a[i] != 0);
    nb += static_cast<double>(b[i] != 0);
  }
  if (na == 0 || nb == 0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double proximity(std::span<const std::uint8_t> original, std::span<const std::uint8_t> perturbed,
                 double kernel_width) {
  const double d = cosine_distance(original, perturbed);
  return std::exp(-(d * d) / (kernel_width * kernel_width));
}

namespace {

// In-place Cholesky solve of the SPD system a x = b (a is d x d row-major).
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t d) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, std::abs(a[i * d + i]));
  const double tolerance = 1e-12 * std::max(max_diag, 1e-300);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (!(diag > tolerance)) {
      throw RankDeficientError("surrogate normal equations are singular (feature " + std::to_string(j) +
                               "); use a positive ridge penalty");
    }
    const double l = std::sqrt(diag);
    a[j * d + j] = l;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * d + k] * b[k];
    b[i] = v / a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= a[k * d + i] * b[k];
    b[i] = v / a[i * d + i];
  }
  return b;
}

void check_inputs(const std::vector<Mask>& samples, std::span<const double> labels, std::span<const double> weights) {
  if (samples.size() < 2) throw UsageError("surrogate fit needs at least 2 samples");
  if (labels.size() != samples.size() || weights.size() != samples.size()) {
    throw UsageError("samples, labels and weights must have equal length");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != samples[0].size()) throw UsageError("samples differ in width");
    if (!(labels[i] >= 0.0 && labels[i] <= 1.0)) throw UsageError("labels must be probabilities in [0, 1]");
    if (!(weights[i] >= 0.0)) throw UsageError("weights must be non-negative");
  }
}

}  // namespace

SurrogateFit fit_weighted_ridge(const std::vector<Mask>& samples, std::span<const double> labels,
                                std::span<const double> weights, std::span<const std::size_t> features,
                                double ridge_penalty) {
  check_inputs(samples, labels, weights);
  const std::size_t m = samples.size();
  const std::size_t d = features.size();

  double total_weight = 0.0, y_mean = 0.0;
  std::vector<double> x_mean(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    total_weight += weights[i];
    y_mean += weights[i] * labels[i];
    for (std::size_t k = 0; k < d; ++k) x_mean[k] += weights[i] * samples[i][features[k]];
  }
  if (!(total_weight > 0.0)) throw UsageError("sample weights sum to zero");
  y_mean /= total_weight;
  for (double& v : x_mean) v /= total_weight;

  SurrogateFit fit;
  fit.features.assign(features.begin(), features.end());
  fit.coefficients.assign(d, 0.0);
  const bool constant_labels =
      std::all_of(labels.begin(), labels.end(), [&](double y) { return y == labels[0]; });
  if (constant_labels) {
    fit.intercept = labels[0];
    fit.local_fidelity = 1.0;
    return fit;
  }

  std::vector<double> gram(d * d, 0.0), rhs(d, 0.0), xc(d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) xc[k] = samples[i][features[k]] - x_mean[k];
    const double yc = labels[i] - y_mean;
    for (std::size_t r = 0; r < d; ++r) {
      const double wx = weights[i] * xc[r];
      rhs[r] += wx * yc;
      for (std::size_t c = 0; c <= r; ++c) gram[r * d + c] += wx * xc[c];
    }
  }
  for (std::size_t r = 0; r < d; ++r) {
    gram[r * d + r] += ridge_penalty;
    for (std::size_t c = 0; c < r; ++c) gram[c * d + r] = gram[r * d + c];
  }
  if (d > 0) fit.coefficients = cholesky_solve(std::move(gram), std::move(rhs), d);
  fit.intercept = y_mean;
  for (std::size_t k = 0; k < d; ++k) fit.intercept -= fit.coefficients[k] * x_mean[k];

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double pred = fit.intercept;
    for (std::size_t k = 0; k < d; ++k) pred += fit.coefficients[k] * samples[i][features[k]];
    ss_res += weights[i] * (labels[i] - pred) * (labels[i] - pred);
    ss_tot += weights[i] * (labels[i] - y_mean) * (labels[i] - y_mean);
  }
  fit.local_fidelity = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

SurrogateFit fit_surrogate(const std::vector<Mask>& samples, std::span<const double> labels,
                           std::span<const double> weights, const LimeConfig& config) {
  config.validate();
  check_inputs(samples, labels, weights);
  const std::size_t n = samples.front().size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  SurrogateFit full = fit_weighted_ridge(samples, labels, weights, all, config.ridge_penalty);

  std::vector<std::size_t> ranked = all;
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(full.coefficients[a]) > std::abs(full.coefficients[b]);
  });
  SurrogateFit fit;
  if (config.top_k >= n) {
    fit = std::move(full);
  } else {
    std::vector<std::size_t> selected(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(config.top_k));
    std::sort(selected.begin(), selected.end());
    fit = fit_weighted_ridge(samples, labels, weights, selected, config.ridge_penalty);
  }

  std::vector<std::size_t> order(fit.features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(fit.coefficients[a]) > std::abs(fit.coefficients[b]);
  });
  SurrogateFit ordered = fit;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ordered.features[i] = fit.features[order[i]];
    ordered.coefficients[i] = fit.coefficients[order[i]];
  }
  return ordered;
}

Explanation explain(std::string_view review, const Classifier& classifier, const LimeConfig& config,
                    std::string review_id) {
  config.validate();
  const InterpretableInstance instance = InterpretableInstance::from_text(review);
  if (instance.feature_count() == 0) throw CannotExplainError("review has no tokens after preprocessing");

  SeededRng rng = SeededRng(config.seed).derive("lime");
  const auto perturbations = perturb(instance, config, rng);

  std::vector<std::string> texts;
  std::vector<Mask> masks;
  texts.reserve(perturbations.size());
  masks.reserve(perturbations.size());
  for (const auto& p : perturbations) {
    texts.push_back(p.text);
    masks.push_back(p.mask);
  }
  const std::vector<double> labels = classifier(texts);
  if (labels.size() != texts.size()) throw UsageError("classifier returned the wrong number of scores");

  std::vector<double> weights(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) weights[i] = proximity(masks[0], masks[i], config.kernel_width);

  Explanation e;
  e.review_id = std::move(review_id);
  e.text = perturbations[0].text;
  e.config = config;
  e.feature_count = instance.feature_count();
  e.p_positive = labels[0];
  e.p_negative = 1.0 - labels[0];

  if (masks.size() >= 2) {
    const SurrogateFit fit = fit_surrogate(masks, labels, weights, config);
    for (std::size_t i = 0; i < fit.features.size(); ++i) {
      e.token_weights.push_back({instance.distinct_tokens[fit.features[i]], fit.coefficients[i]});
    }
    e.intercept = fit.intercept;
    e.local_fidelity = fit.local_fidelity;
  } else {
    e.intercept = labels[0];
    e.local_fidelity = 1.0;
  }
  return e;
}

std::string to_json(const Explanation& e) {
  nlohmann::ordered_json weights = nlohmann::ordered_json::array();
  for (const auto& tw : e.token_weights) weights.push_back({{"token", tw.token}, {"weight", tw.weight}});
  nlohmann::ordered_json record = {
      {"review_id", e.review_id},
      {"text", e.text},
      {"predicted_probabilities", {{"negative", e.p_negative}, {"positive", e.p_positive}}},
      {"token_weights", weights},
      {"intercept", e.intercept},
      {"local_fidelity", e.local_fidelity},
      {"feature_count", e.feature_count},
      {"config",
       {{"num_samples", e.config.num_samples},
        {"kernel_width", e.config.kernel_width},
        {"ridge_penalty", e.config.ridge_penalty},
        {"top_k", e.config.top_k},
        {"seed", e.config.seed}}},
  };
  return record.dump(2) + "\n";
}

Explanation from_json(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    Explanation e;
    e.review_id = j.at("review_id").get<std::string>();
    e.text = j.at("text").get<std::string>();
    e.p_negative = j.at("predicted_probabilities").at("negative").get<double>();
    e.p_positive = j.at("predicted_probabilities").at("positive").get<double>();
    for (const auto& tw : j.at("token_weights")) {
      e.token_weights.push_back({tw.at("token").get<std::string>(), tw.at("weight").get<double>()});
    }
    e.intercept = j.at("intercept").get<double>();
    e.local_fidelity = j.at("local_fidelity").get<double>();
    e.feature_count = j.at("feature_count").get<std::size_t>();
    const auto& c = j.at("config");
    e.config.num_samples = c.at("num_samples").get<std::size_t>();
    e.config.kernel_width = c.at("kernel_width").get<double>();
    e.config.ridge_penalty = c.at("ridge_penalty").get<double>();
    e.config.top_k = c.at("top_k").get<std::size_t>();
    e.config.seed = c.at("seed").get<std::uint64_t>();
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw DataError(std::string("malformed explanation record: ") + err.what());
  }
}

}  // namespace asa::lime
