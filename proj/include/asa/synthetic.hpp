#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace asa::synthetic {

/// Generative rule for an HTL-shaped surrogate corpus. Each review is a run
/// of Zipf-distributed neutral words with sentiment markers planted at
/// `marker_rate`; a marker agrees with the review's class with probability
/// `marker_agreement`. A fraction `label_noise` of labels is then flipped,
/// which caps achievable test accuracy and leaves room to overfit.
struct SyntheticConfig {
  std::size_t positives = 4000;
  std::size_t negatives = 2645;
  std::size_t neutrals = 500;
  std::size_t neutral_words = 3000;
  std::size_t min_tokens = 15;
  std::size_t max_tokens = 60;
  double marker_rate = 0.2;
  double marker_agreement = 0.85;
  double label_noise = 0.03;
  std::uint64_t seed = 7;
};

struct Lexicon {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::vector<std::string> neutral;
};

/// Deterministic in config.seed. Real Arabic sentiment words lead each
/// marker list; the rest are generated letter strings.
Lexicon make_lexicon(const SyntheticConfig& config);

struct SyntheticReview {
  std::string polarity;  // "positive", "negative" or "neutral"
  std::string text;
};

std::vector<SyntheticReview> generate(const SyntheticConfig& config);

/// Tab-separated `polarity<TAB>text` with a header row, readable by the HTL
/// ingest path.
void write_htl_tsv(std::ostream& out, const std::vector<SyntheticReview>& reviews);
void write_htl_tsv(const std::filesystem::path& path, const SyntheticConfig& config);

}  // namespace asa::synthetic
