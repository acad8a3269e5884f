#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asa/config.hpp"
#include "asa/lime.hpp"
#include "asa/report.hpp"
#include "asa/synthetic.hpp"
#include "asa/training.hpp"

namespace asa::cli {

/// Provenance record written as run_manifest.json next to every artifact.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string dataset_hash;
  std::string checkpoint;
  std::vector<std::string> artifacts;
  std::string started_at;
  std::string finished_at;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
std::string utc_timestamp();

struct PrepareOptions {
  std::string dataset;  // "labr" or "htl"
  std::filesystem::path input;
  std::filesystem::path out;
  bool balance = false;
  std::uint64_t seed = 42;
  /// Defaults to 256 for LABR and 128 for HTL.
  std::optional<std::size_t> max_len;
  std::size_t vocab_size = 10000;
  /// Defaults to 0.8 for LABR and 0.75 for HTL.
  std::optional<double> train_fraction;
  bool check_expected_counts = true;
};

LabeledCorpus cmd_prepare(const PrepareOptions& options, std::ostream& log);

struct TrainCommandOptions {
  RunConfig config;
  bool resume = false;
};

/// Writes checkpoint.asa, trace.csv and run_manifest.json into config.out.
/// With resume, continues the checkpoint already in config.out after
/// checking that its spec matches apart from the epoch count.
TrainResult cmd_train(const TrainCommandOptions& options, std::ostream& log);

struct EvaluateOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> out;  // metrics.csv / metrics.txt
};

/// Refuses checkpoints whose vocabulary hash differs from the corpus.
EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& log);

struct ExplainOptions {
  std::filesystem::path checkpoint;
  std::optional<std::string> text;
  std::optional<std::size_t> id;  // document index in the corpus
  std::optional<std::filesystem::path> corpus;  // defaults to the checkpoint's corpus
  std::filesystem::path out;
  lime::LimeConfig lime;
};

/// Writes explanation.json, explanation.html, explanation.txt and
/// run_manifest.json into `out`.
lime::Explanation cmd_explain(const ExplainOptions& options, std::ostream& log);

struct ExperimentOptions {
  RunConfig config;
  /// Empty means all six architecture x setup combinations.
  std::vector<std::pair<Architecture, Setup>> only;
};

/// Trains and evaluates each combination; writes metrics.csv, metrics.txt
/// and one checkpoint directory per run. Failed runs are reported and
/// skipped; if every run fails the first failure is rethrown.
std::vector<report::MetricsRow> cmd_experiment(const ExperimentOptions& options, std::ostream& log);

/// Parses "CNN-BiLSTM:ND" style filters.
std::pair<Architecture, Setup> parse_combination(std::string_view text);

struct SynthesizeOptions {
  std::filesystem::path out;
  synthetic::SyntheticConfig config;
};

void cmd_synthesize(const SynthesizeOptions& options, std::ostream& log);

/// Exit code for an exception: 1 usage, 2 data, 3 numeric.
int exit_code_for(const std::exception& error);

}  // namespace asa::cli
