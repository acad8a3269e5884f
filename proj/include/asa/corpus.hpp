#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asa/text_pipeline.hpp"

namespace asa {

struct RawReview {
  std::string source_id;
  std::string text;
  int label = 0;  // 0 negative, 1 positive
};

struct Document {
  std::string source_id;
  std::string text;  // normalized
  int label = 0;
  text::EncodedSequence sequence;
};

struct IngestStats {
  std::size_t records = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t dropped_neutral = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_balance = 0;
  std::vector<std::string> warnings;
};

/// Encoded, padded reviews with binary labels and a train/test partition.
/// The vocabulary is built from the training split only.
struct LabeledCorpus {
  std::string dataset;
  std::vector<Document> documents;
  text::Vocabulary vocabulary;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::size_t max_len = 0;
  std::uint64_t seed = 0;
  std::string config_hash;  // provenance of the ingest settings
  std::string source_hash;  // SHA-256 of the input file, when read from disk
  IngestStats stats;

  std::string vocabulary_hash() const;
  std::vector<text::EncodedSequence> sequences(std::span<const std::size_t> indices) const;
  std::vector<int> labels(std::span<const std::size_t> indices) const;
};

struct IngestConfig {
  std::uint64_t seed = 42;
  std::size_t max_len = 128;
  std::size_t vocab_size = 10000;
  double train_fraction = 0.8;
  bool balance = false;
  bool check_expected_counts = false;

  // LABR: tab-separated columns; text_column < 0 means the last column.
  std::size_t rating_column = 0;
  int labr_text_column = -1;

  // HTL: delimited file with a header row. delimiter '\0' auto-detects tab
  // or comma from the header.
  std::string polarity_column = "polarity";
  std::string text_column = "text";
  char delimiter = '\0';

  std::string describe() const;
};

/// LABR rating rule: 4 and 5 are positive, 1 and 2 negative, 3 is dropped
/// (nullopt). Other values throw MalformedRecordError naming `line`.
std::optional<int> map_labr_label(int rating, std::size_t line = 0);

/// HTL polarity tag: positive/pos/1 -> 1, negative/neg/-1 -> 0,
/// neutral/mixed/0 -> dropped. Anything else is malformed.
std::optional<int> map_htl_polarity(std::string_view tag, std::size_t line = 0);

/// Published totals used for the (non-fatal) count check.
struct ExpectedCounts {
  std::size_t kept;
  std::size_t positive;
  std::size_t negative;
  std::size_t train;
};
inline constexpr ExpectedCounts kLabrExpected{51056, 42832, 8224, 40844};
inline constexpr ExpectedCounts kHtlBalancedExpected{5290, 2645, 2645, 3967};

std::vector<RawReview> read_labr(std::istream& in, const IngestConfig& config, IngestStats& stats);
std::vector<RawReview> read_htl(std::istream& in, const IngestConfig& config, IngestStats& stats);

/// Down-samples the majority class to the minority count with a seeded
/// shuffle-then-prefix; kept documents stay in input order.
std::vector<RawReview> balance_classes(std::vector<RawReview> reviews, std::uint64_t seed,
                                       IngestStats& stats);

/// Normalizes, drops empty texts, splits, builds the vocabulary from the
/// training split and encodes every document.
LabeledCorpus assemble_corpus(std::string dataset, std::vector<RawReview> reviews,
                              const IngestConfig& config, IngestStats stats = {});

LabeledCorpus ingest_labr(const std::filesystem::path& path, const IngestConfig& config);
LabeledCorpus ingest_htl(const std::filesystem::path& path, const IngestConfig& config);

/// Writes corpus.tsv, vocab.tsv and manifest.json into `dir`.
void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir);
LabeledCorpus load_corpus(const std::filesystem::path& dir);

}  // namespace asa
