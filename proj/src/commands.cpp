#include "asa/commands.hpp"

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "asa/checkpoint.hpp"
#include "asa/errors.hpp"
#include "asa/sentiment_model.hpp"

namespace asa::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointFile = "checkpoint.asa";
constexpr const char* kTraceFile = "trace.csv";

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

LabeledCorpus load_corpus_checked(const std::string& dir) {
  if (dir.empty()) throw UsageError("no corpus given (set `corpus` in the config or pass --corpus)");
  if (!fs::exists(dir)) throw DataError("corpus directory " + dir + " does not exist");
  return load_corpus(dir);
}

void require_matching_vocabulary(const CheckpointMeta& meta, const LabeledCorpus& corpus, const fs::path& where) {
  const std::string corpus_hash = corpus.vocabulary_hash();
  if (meta.vocab_hash != corpus_hash) {
    throw DataError("vocabulary hash mismatch: checkpoint was trained with " + meta.vocab_hash + " but corpus " +
                    where.string() + " has " + corpus_hash + "; re-run train on this corpus");
  }
}

std::string trace_rows(std::span<const EpochStats> trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  const std::string s = out.str();
  return s.substr(s.find('\n') + 1);
}

// Header plus the first `epochs` data rows of an existing trace file.
std::string trace_prefix(const fs::path& path, std::size_t epochs) {
  std::string kept;
  if (!fs::exists(path)) return kept;
  std::istringstream in(read_file(path));
  std::string line;
  for (std::size_t i = 0; i <= epochs && std::getline(in, line); ++i) kept += line + '\n';
  return kept;
}

std::string setup_label(Setup setup) { return "Model_" + to_string(setup); }

std::string run_dir_name(const ModelSpec& spec) {
  return to_string(spec.architecture) + "_" + to_string(spec.setup);
}

// Trains one spec into `dir`, writing checkpoint, trace and manifest.
TrainResult train_into(const ModelSpec& spec, const LabeledCorpus& corpus, const RunConfig& config,
                       const fs::path& dir, bool resume, const std::string& command, std::ostream& log) {
  ensure_dir(dir);
  RunManifest manifest;
  manifest.command = command;
  manifest.started_at = utc_timestamp();
  const fs::path checkpoint_path = dir / kCheckpointFile;

  TrainOptions opts;
  opts.epochs = spec.epochs;
  opts.on_epoch = [&](const EpochStats& s) {
    log << describe(spec) << " epoch " << s.epoch << "/" << spec.epochs << " loss " << s.train_loss << " acc "
        << s.train_accuracy << '\n';
  };

  TrainResult result{nn::Network(spec), AdamState{}, {}, 0};
  std::string trace_text;
  if (resume && fs::exists(checkpoint_path)) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const auto differing = ckpt.network.spec().differing_fields(spec, true);
    if (!differing.empty()) {
      std::string fields;
      for (const auto& f : differing) fields += (fields.empty() ? "" : ", ") + f;
      throw UsageError("refusing to resume " + checkpoint_path.string() + ": model spec differs in " + fields);
    }
    require_matching_vocabulary(ckpt.meta, corpus, config.corpus);
    const std::size_t done = ckpt.meta.epochs_completed;
    log << "resuming from epoch " << done << '\n';
    ckpt.network.set_epochs(spec.epochs);
    AdamState adam = ckpt.adam ? std::move(*ckpt.adam) : AdamState::for_params(ckpt.network.parameters());
    result = resume_training(TrainResult{std::move(ckpt.network), std::move(adam), {}, done}, corpus, opts);
    trace_text = trace_prefix(dir / kTraceFile, done);
    if (trace_text.empty()) trace_text = "epoch,train_loss,train_acc\n";
    trace_text += trace_rows(result.trace);
  } else {
    if (resume) log << "no checkpoint in " << dir.string() << ", starting fresh\n";
    result = train(spec, corpus, opts);
    std::ostringstream trace;
    write_trace_csv(trace, result.trace);
    trace_text = trace.str();
  }

  CheckpointMeta meta{corpus.vocabulary, corpus.vocabulary_hash(), config.corpus, corpus.source_hash,
                      result.epochs_completed};
  save_checkpoint(checkpoint_path, result.network, meta, &result.adam);
  write_file(dir / kTraceFile, trace_text);

  RunConfig snapshot = config;
  snapshot.spec = spec;
  snapshot.out = dir.string();
  manifest.config = snapshot.to_key_values();
  manifest.seed = spec.seed;
  manifest.dataset_hash = corpus.source_hash;
  manifest.checkpoint = checkpoint_path.string();
  manifest.artifacts = {checkpoint_path.string(), (dir / kTraceFile).string()};
  manifest.finished_at = utc_timestamp();
  write_manifest(dir, manifest);
  return result;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  nlohmann::ordered_json j = {
      {"command", m.command},         {"config", m.config},
      {"seed", m.seed},               {"dataset_hash", m.dataset_hash},
      {"checkpoint", m.checkpoint},   {"artifacts", m.artifacts},
      {"started_at", m.started_at},   {"finished_at", m.finished_at},
  };
  write_file(dir / "run_manifest.json", j.dump(2) + "\n");
}

LabeledCorpus cmd_prepare(const PrepareOptions& o, std::ostream& log) {
  if (o.input.empty()) throw UsageError("prepare needs --input");
  if (o.out.empty()) throw UsageError("prepare needs --out");
  if (!fs::exists(o.input)) throw DataError("input file " + o.input.string() + " does not exist");
  RunManifest manifest;
  manifest.command = "prepare";
  manifest.started_at = utc_timestamp();

  IngestConfig cfg;
  cfg.seed = o.seed;
  cfg.vocab_size = o.vocab_size;
  cfg.balance = o.balance;
  cfg.check_expected_counts = o.check_expected_counts;
  LabeledCorpus corpus;
  if (o.dataset == "labr") {
    cfg.train_fraction = o.train_fraction.value_or(0.8);
    cfg.max_len = o.max_len.value_or(256);
    corpus = ingest_labr(o.input, cfg);
  } else if (o.dataset == "htl") {
    cfg.train_fraction = o.train_fraction.value_or(0.75);
    cfg.max_len = o.max_len.value_or(128);
    corpus = ingest_htl(o.input, cfg);
  } else {
    throw UsageError("unknown dataset '" + o.dataset + "' (expected labr or htl)");
  }
  for (const auto& w : corpus.stats.warnings) log << "warning: " << w << '\n';

  ensure_dir(o.out);
  save_corpus(corpus, o.out);
  log << corpus.dataset << ": " << corpus.documents.size() << " documents (" << corpus.stats.positive
      << " positive, " << corpus.stats.negative << " negative), train " << corpus.train.size() << ", test "
      << corpus.test.size() << ", vocabulary " << corpus.vocabulary.size() << '\n';

  std::ostringstream fraction;
  fraction << cfg.train_fraction;
  manifest.config = {{"dataset", o.dataset},
                     {"input", o.input.string()},
                     {"balance", o.balance ? "true" : "false"},
                     {"max_len", std::to_string(cfg.max_len)},
                     {"vocab_size", std::to_string(o.vocab_size)},
                     {"train_fraction", fraction.str()}};
  manifest.seed = o.seed;
  manifest.dataset_hash = corpus.source_hash;
  manifest.artifacts = {(o.out / "corpus.tsv").string(), (o.out / "vocab.tsv").string(),
                        (o.out / "manifest.json").string()};
  manifest.finished_at = utc_timestamp();
  write_manifest(o.out, manifest);
  return corpus;
}

TrainResult cmd_train(const TrainCommandOptions& o, std::ostream& log) {
  if (o.config.out.empty()) throw UsageError("train needs an output directory (`out` key or --out)");
  const LabeledCorpus corpus = load_corpus_checked(o.config.corpus);
  return train_into(o.config.spec, corpus, o.config, o.config.out, o.resume, "train", log);
}

EvalReport cmd_evaluate(const EvaluateOptions& o, std::ostream& log) {
  if (!fs::exists(o.checkpoint)) throw DataError("checkpoint " + o.checkpoint.string() + " does not exist");
  Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const LabeledCorpus corpus = load_corpus_checked(o.corpus.string());
  require_matching_vocabulary(ckpt.meta, corpus, o.corpus);
  const ModelSpec spec = ckpt.network.spec();
  const EvalReport report = evaluate(ckpt.network, corpus);
  const report::MetricsRow rows[] = {{to_string(spec.architecture), setup_label(spec.setup), report}};
  log << report::metrics_table(rows);
  if (o.out) {
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.started_at = utc_timestamp();
    ensure_dir(*o.out);
    write_file(*o.out / "metrics.csv", report::metrics_csv(rows));
    write_file(*o.out / "metrics.txt", report::metrics_table(rows));
    manifest.config = spec.to_key_values();
    manifest.config["corpus"] = o.corpus.string();
    manifest.seed = spec.seed;
    manifest.dataset_hash = corpus.source_hash;
    manifest.checkpoint = o.checkpoint.string();
    manifest.artifacts = {(*o.out / "metrics.csv").string(), (*o.out / "metrics.txt").string()};
    manifest.finished_at = utc_timestamp();
    write_manifest(*o.out, manifest);
  }
  return report;
}

lime::Explanation cmd_explain(const ExplainOptions& o, std::ostream& log) {
  if (o.text.has_value() == o.id.has_value()) throw UsageError("explain needs exactly one of --text or --id");
  if (o.out.empty()) throw UsageError("explain needs --out");
  if (!fs::exists(o.checkpoint)) throw DataError("checkpoint " + o.checkpoint.string() + " does not exist");
  RunManifest manifest;
  manifest.command = "explain";
  manifest.started_at = utc_timestamp();
  Checkpoint ckpt = load_checkpoint(o.checkpoint);

  std::string review = o.text.value_or("");
  std::string review_id = "text";
  std::string dataset_hash = ckpt.meta.dataset_hash;
  if (o.id) {
    const fs::path corpus_dir = o.corpus.value_or(fs::path(ckpt.meta.corpus_path));
    const LabeledCorpus corpus = load_corpus_checked(corpus_dir.string());
    require_matching_vocabulary(ckpt.meta, corpus, corpus_dir);
    if (*o.id >= corpus.documents.size()) {
      throw UsageError("--id " + std::to_string(*o.id) + " is out of range (corpus has " +
                       std::to_string(corpus.documents.size()) + " documents)");
    }
    review = corpus.documents[*o.id].text;
    review_id = corpus.documents[*o.id].source_id;
    dataset_hash = corpus.source_hash;
  }

  const ModelSpec spec = ckpt.network.spec();
  SentimentModel model(std::move(ckpt.network), std::move(ckpt.meta.vocabulary));
  const lime::Explanation e = lime::explain(review, model.classifier(), o.lime, review_id);

  ensure_dir(o.out);
  write_file(o.out / "explanation.json", lime::to_json(e));
  write_file(o.out / "explanation.html", report::render_html(e));
  write_file(o.out / "explanation.txt", report::render_text(e, false));
  log << report::render_text(e, false);

  manifest.config = spec.to_key_values();
  manifest.config["lime_num_samples"] = std::to_string(o.lime.num_samples);
  manifest.config["lime_top_k"] = std::to_string(o.lime.top_k);
  manifest.seed = o.lime.seed;
  manifest.dataset_hash = dataset_hash;
  manifest.checkpoint = o.checkpoint.string();
  manifest.artifacts = {(o.out / "explanation.json").string(), (o.out / "explanation.html").string(),
                        (o.out / "explanation.txt").string()};
  manifest.finished_at = utc_timestamp();
  write_manifest(o.out, manifest);
  return e;
}

std::pair<Architecture, Setup> parse_combination(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw UsageError("expected ARCH:SETUP, got '" + std::string(text) + "'");
  return {parse_architecture(text.substr(0, colon)), parse_setup(text.substr(colon + 1))};
}

std::vector<report::MetricsRow> cmd_experiment(const ExperimentOptions& o, std::ostream& log) {
  if (o.config.out.empty()) throw UsageError("experiment needs an output directory (`out` key or --out)");
  const LabeledCorpus corpus = load_corpus_checked(o.config.corpus);
  std::vector<std::pair<Architecture, Setup>> combos = o.only;
  if (combos.empty()) {
    for (const auto arch : {Architecture::kBiLstm, Architecture::kCnnBiLstm}) {
      for (const auto setup : {Setup::kNoiseDropout, Setup::kNoise, Setup::kDropout}) combos.emplace_back(arch, setup);
    }
  }

  const fs::path out = o.config.out;
  ensure_dir(out);
  RunManifest manifest;
  manifest.command = "experiment";
  manifest.started_at = utc_timestamp();

  std::vector<report::MetricsRow> rows;
  std::exception_ptr first_failure;
  for (const auto& [arch, setup] : combos) {
    ModelSpec spec = o.config.spec;
    spec.architecture = arch;
    spec.setup = setup;
    const fs::path dir = out / run_dir_name(spec);
    try {
      TrainResult result = train_into(spec, corpus, o.config, dir, false, "experiment", log);
      const EvalReport report = evaluate(result.network, corpus);
      rows.push_back({to_string(arch), setup_label(setup), report});
      manifest.artifacts.push_back((dir / kCheckpointFile).string());
    } catch (const std::exception& e) {
      log << "run " << describe(spec) << " failed: " << e.what() << '\n';
      if (!first_failure) first_failure = std::current_exception();
    }
  }
  if (rows.empty() && first_failure) std::rethrow_exception(first_failure);

  write_file(out / "metrics.csv", report::metrics_csv(rows));
  write_file(out / "metrics.txt", report::metrics_table(rows));
  log << report::metrics_table(rows);
  manifest.config = o.config.to_key_values();
  manifest.seed = o.config.spec.seed;
  manifest.dataset_hash = corpus.source_hash;
  manifest.artifacts.push_back((out / "metrics.csv").string());
  manifest.artifacts.push_back((out / "metrics.txt").string());
  manifest.finished_at = utc_timestamp();
  write_manifest(out, manifest);
  return rows;
}

void cmd_synthesize(const SynthesizeOptions& o, std::ostream& log) {
  if (o.out.empty()) throw UsageError("synthesize needs --out");
  if (o.out.has_parent_path()) ensure_dir(o.out.parent_path());
  synthetic::write_htl_tsv(o.out, o.config);
  log << "wrote " << (o.config.positives + o.config.negatives + o.config.neutrals) << " synthetic reviews to "
      << o.out.string() << '\n';
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const UsageError*>(&error)) return 1;
  if (dynamic_cast<const NumericError*>(&error)) return 3;
  if (dynamic_cast<const DataError*>(&error)) return 2;
  if (dynamic_cast<const fs::filesystem_error*>(&error)) return 2;
  return 1;
}

}  // namespace asa::cli
