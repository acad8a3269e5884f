// Acceptance suite: one PASS / FAIL / SKIPPED-EXTERNAL line per criterion.
//
// External datasets are picked up from ASA_LABR_PATH and ASA_HTL_PATH; the
// full LABR reproduction (criterion 8) additionally needs ASA_FULL_LABR=1.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asa/commands.hpp"
#include "asa/corpus.hpp"
#include "asa/lime.hpp"
#include "asa/synthetic.hpp"
#include "asa/training.hpp"
#include "gradcheck.hpp"
#include "lime_oracle.hpp"

namespace fs = std::filesystem;
using namespace asa;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { kPass, kFail, kSkipped, kInfo };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

const char* label(Status s) {
  switch (s) {
    case Status::kPass:
      return "PASS";
    case Status::kFail:
      return "FAIL";
    case Status::kSkipped:
      return "SKIPPED-EXTERNAL";
    case Status::kInfo:
      return "INFO";
  }
  return "?";
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string f(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- 1

Outcome gradient_correctness() {
  const auto start = Clock::now();
  testing::GradCheck worst;
  std::string worst_name;
  auto absorb = [&](const std::vector<testing::NamedCheck>& checks) {
    for (const auto& c : checks) {
      if (c.result.max_rel_error >= worst.max_rel_error) worst_name = c.name;
      worst.merge(c.result);
    }
  };
  absorb(testing::layer_checks());
  absorb(testing::network_checks());
  const double secs = seconds_since(start);
  const bool ok = worst.max_rel_error < 1e-4 && secs < 60.0;
  return {ok ? Status::kPass : Status::kFail,
          "max rel error " + testing::fmt_g(worst.max_rel_error) + " over " + std::to_string(worst.checked) +
              " partials (worst: " + worst_name + " " + worst.worst + "), " + f(secs, 1) + " s"};
}

// ---------------------------------------------------------------- 2

Outcome lime_oracle() {
  const auto start = Clock::now();
  SeededRng rng(2024);
  double max_diff = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto z = testing::enumerate_masks(n);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    for (const double lambda : {0.0, 1e-3, 1.0}) {
      std::vector<double> y, w;
      for (const auto& m : z) {
        y.push_back(rng.uniform());
        w.push_back(lime::proximity(z[0], m, 0.75));
      }
      lime::LimeConfig cfg;
      cfg.ridge_penalty = lambda;
      const auto fit = lime::fit_surrogate(z, y, w, cfg);
      const auto oracle = testing::oracle_weighted_ridge(z, y, w, all, lambda);
      max_diff = std::max(max_diff, std::abs(fit.intercept - oracle.intercept));
      for (std::size_t i = 0; i < fit.features.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(fit.coefficients[i] - oracle.coefficients[fit.features[i]]));
      }
    }
  }

  double worst_planted = 0.0, worst_other = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const std::size_t planted = n - 1;
    const auto z = testing::enumerate_masks(n);
    std::vector<double> y, w;
    for (const auto& m : z) {
      y.push_back(0.1 + 0.3 * m[planted]);
      w.push_back(lime::proximity(z[0], m, 25.0));
    }
    lime::LimeConfig cfg;
    cfg.ridge_penalty = 1e-8;
    const auto fit = lime::fit_surrogate(z, y, w, cfg);
    for (std::size_t i = 0; i < fit.features.size(); ++i) {
      if (fit.features[i] == planted) {
        worst_planted = std::max(worst_planted, std::abs(fit.coefficients[i] - 0.3));
      } else {
        worst_other = std::max(worst_other, std::abs(fit.coefficients[i]));
      }
    }
  }
  const double secs = seconds_since(start);
  const bool ok = max_diff < 1e-9 && worst_planted < 1e-3 && worst_other < 1e-3 && secs < 30.0;
  return {ok ? Status::kPass : Status::kFail,
          "max |surrogate - closed form| " + testing::fmt_g(max_diff) + ", planted 0.3 off by " +
              testing::fmt_g(worst_planted) + ", others <= " + testing::fmt_g(worst_other) + ", " + f(secs, 2) +
              " s"};
}

// ---------------------------------------------------------------- 3

Outcome golden_counts() {
  const auto labr = env("ASA_LABR_PATH");
  const auto htl = env("ASA_HTL_PATH");
  if (!labr && !htl) {
    return {Status::kSkipped, "set ASA_LABR_PATH / ASA_HTL_PATH; ingest rules are covered by fixture unit tests"};
  }
  std::vector<std::string> notes;
  bool ok = true;
  if (labr) {
    IngestConfig cfg;
    cfg.max_len = 256;
    const auto c = ingest_labr(*labr, cfg);
    const std::size_t pos = c.stats.positive, neg = c.stats.negative;
    const bool match = c.documents.size() == kLabrExpected.kept && pos == kLabrExpected.positive &&
                       neg == kLabrExpected.negative && c.train.size() == kLabrExpected.train &&
                       c.test.size() == kLabrExpected.kept - kLabrExpected.train;
    ok = ok && match;
    notes.push_back("LABR " + std::to_string(c.documents.size()) + " kept / " + std::to_string(pos) + " pos / " +
                    std::to_string(neg) + " neg, split " + std::to_string(c.train.size()) + "/" +
                    std::to_string(c.test.size()));
  } else {
    notes.push_back("LABR not provided");
  }
  if (htl) {
    IngestConfig cfg;
    cfg.balance = true;
    cfg.train_fraction = 0.75;
    const auto c = ingest_htl(*htl, cfg);
    const bool match = c.stats.positive == kHtlBalancedExpected.positive &&
                       c.stats.negative == kHtlBalancedExpected.negative &&
                       c.train.size() == kHtlBalancedExpected.train &&
                       c.test.size() == kHtlBalancedExpected.kept - kHtlBalancedExpected.train;
    ok = ok && match;
    notes.push_back("HTL " + std::to_string(c.stats.positive) + "+" + std::to_string(c.stats.negative) + ", split " +
                    std::to_string(c.train.size()) + "/" + std::to_string(c.test.size()));
  } else {
    notes.push_back("HTL not provided");
  }
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  if (!labr || !htl) return {ok ? Status::kSkipped : Status::kFail, detail};
  return {ok ? Status::kPass : Status::kFail, detail};
}

// ---------------------------------------------------------------- 4 and 5

struct DeskRun {
  std::uint64_t seed;
  Setup setup;
  EvalReport report;
  double seconds;
};

struct DeskScale {
  fs::path work;
  std::size_t max_len = 64;
  std::size_t epochs = 10;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  LabeledCorpus corpus;
  std::vector<DeskRun> runs;

  void prepare() {
    fs::create_directories(work);
    const auto tsv = work / "synthetic_htl.tsv";
    synthetic::write_htl_tsv(tsv, synthetic::SyntheticConfig{});
    IngestConfig cfg;
    cfg.balance = true;
    cfg.train_fraction = 0.75;
    cfg.max_len = max_len;
    corpus = ingest_htl(tsv, cfg);
    std::cerr << "desk corpus: " << corpus.documents.size() << " documents, " << corpus.train.size() << "/"
              << corpus.test.size() << " split, vocabulary " << corpus.vocabulary.size() << "\n";
  }

  const DeskRun& run(std::uint64_t seed, Setup setup) {
    for (const auto& r : runs) {
      if (r.seed == seed && r.setup == setup) return r;
    }
    ModelSpec spec;
    spec.architecture = Architecture::kCnnBiLstm;
    spec.setup = setup;
    spec.max_len = max_len;
    spec.epochs = epochs;
    spec.seed = seed;
    TrainOptions opts;
    opts.on_epoch = [&](const EpochStats& s) {
      std::cerr << "  " << describe(spec) << " epoch " << s.epoch << " loss " << f(s.train_loss) << " acc "
                << f(s.train_accuracy) << "\n";
    };
    const auto start = Clock::now();
    auto result = train(spec, corpus, opts);
    const auto report = evaluate(result.network, corpus);
    runs.push_back({seed, setup, report, seconds_since(start)});
    std::cerr << "  -> test " << f(report.test_accuracy) << " overfit " << f(report.overfit_percent, 2) << " ("
              << f(runs.back().seconds, 0) << " s)\n";
    return runs.back();
  }
};

Outcome desk_training(DeskScale& desk) {
  const auto& r = desk.run(desk.seeds.front(), Setup::kNoiseDropout);
  const bool ok = r.report.test_accuracy >= 0.85 && r.seconds <= 45 * 60.0;
  return {ok ? Status::kPass : Status::kFail,
          "CNN-BiLSTM Model_ND seed " + std::to_string(r.seed) + ": test acc " + f(r.report.test_accuracy) +
              " (gate >= 0.85; published 0.9478), train acc " + f(r.report.train_accuracy) + ", " +
              std::to_string(desk.epochs) + " epochs in " + f(r.seconds / 60.0, 1) + " min (gate <= 45)"};
}

Outcome noise_effect(DeskScale& desk) {
  double sum_nd = 0.0, sum_d = 0.0;
  std::size_t wins = 0;
  std::string per_seed;
  for (const auto seed : desk.seeds) {
    const double nd = desk.run(seed, Setup::kNoiseDropout).report.overfit_percent;
    const double d = desk.run(seed, Setup::kDropout).report.overfit_percent;
    sum_nd += nd;
    sum_d += d;
    wins += nd < d;
    per_seed += (per_seed.empty() ? "" : ", ") + std::to_string(seed) + ": " + f(nd, 2) + " vs " + f(d, 2);
  }
  const double n = static_cast<double>(desk.seeds.size());
  const double mean_nd = sum_nd / n, mean_d = sum_d / n;
  const bool ok = mean_nd < mean_d && wins >= 3;
  return {ok ? Status::kPass : Status::kFail,
          "mean overfit ND " + f(mean_nd, 2) + " vs D " + f(mean_d, 2) + " (delta " + f(mean_d - mean_nd, 2) +
              " points; published 2.88 on HTL, 1-2 on LABR), ND lower in " + std::to_string(wins) + "/" +
              std::to_string(desk.seeds.size()) + " seeds [" + per_seed + "]"};
}

// ---------------------------------------------------------------- 6

Outcome metric_arithmetic() {
  const double overfit = overfit_percent(0.9985, 0.9478);
  SeededRng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ConfusionMatrix cm{1 + rng.below(1000), 1 + rng.below(1000), 1 + rng.below(1000), 1 + rng.below(1000)};
    for (const int cls : {0, 1}) {
      const auto m = class_metrics(cm, cls);
      const double tp = static_cast<double>(cls ? cm.tp : cm.tn);
      const double fp = static_cast<double>(cls ? cm.fp : cm.fn);
      const double fn = static_cast<double>(cls ? cm.fn : cm.fp);
      const double p = tp / (tp + fp), r = tp / (tp + fn);
      worst = std::max({worst, std::abs(m.precision - p), std::abs(m.recall - r),
                        std::abs(m.f1 - 2.0 / (1.0 / p + 1.0 / r))});
    }
  }
  const bool ok = std::abs(overfit - 5.07) < 1e-9 && worst < 1e-9;
  return {ok ? Status::kPass : Status::kFail, "overfit(0.9985, 0.9478) = " + testing::fmt_g(overfit) +
                                                   " (published 5.07); max P/R/F1 deviation " + testing::fmt_g(worst) +
                                                   " over 10000 random confusion matrices"};
}

// ---------------------------------------------------------------- 7

Outcome determinism(const fs::path& work) {
  const auto root = work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  synthetic::SyntheticConfig synth;
  synth.positives = 300;
  synth.negatives = 240;
  synth.neutrals = 20;
  synthetic::write_htl_tsv(root / "reviews.tsv", synth);

  // Both passes use the same paths, since checkpoints record their corpus
  // directory; artifacts are snapshotted between passes.
  std::vector<std::string> compared = {"corpus/corpus.tsv", "corpus/vocab.tsv", "model/checkpoint.asa",
                                       "model/trace.csv",   "eval/metrics.csv", "explain/explanation.json",
                                       "explain/explanation.html"};
  std::map<std::string, std::string> first;
  std::ostringstream sink;
  const auto dir = root / "run";
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir);
    cli::PrepareOptions prep;
    prep.dataset = "htl";
    prep.input = root / "reviews.tsv";
    prep.out = dir / "corpus";
    prep.balance = true;
    prep.max_len = 32;
    prep.check_expected_counts = false;
    cli::cmd_prepare(prep, sink);

    cli::TrainCommandOptions train_opts;
    auto& spec = train_opts.config.spec;
    spec.max_len = 32;
    spec.embed_dim = 16;
    spec.hidden = 8;
    spec.filters = 8;
    spec.dense_sizes = {16, 8, 8, 1};
    spec.epochs = 2;
    train_opts.config.corpus = (dir / "corpus").string();
    train_opts.config.out = (dir / "model").string();
    cli::cmd_train(train_opts, sink);

    cli::cmd_evaluate({dir / "model/checkpoint.asa", dir / "corpus", dir / "eval"}, sink);

    cli::ExplainOptions ex;
    ex.checkpoint = dir / "model/checkpoint.asa";
    ex.id = 0;
    ex.out = dir / "explain";
    cli::cmd_explain(ex, sink);
    if (pass == 0) {
      for (const auto& rel : compared) first[rel] = slurp(dir / rel);
    }
  }
  std::string differing;
  for (const auto& rel : compared) {
    const auto again = slurp(dir / rel);
    if (again.empty() || again != first[rel]) differing += (differing.empty() ? "" : ", ") + rel;
  }
  if (!differing.empty()) return {Status::kFail, "artifacts differ between runs: " + differing};
  return {Status::kPass, "prepare -> train -> evaluate -> explain twice: " + std::to_string(compared.size()) +
                             " artifacts byte-identical (incl. metrics.csv, explanation.json)"};
}

// ---------------------------------------------------------------- 8

Outcome full_labr() {
  const auto labr = env("ASA_LABR_PATH");
  if (!labr || env("ASA_FULL_LABR").value_or("") != "1") {
    return {Status::kSkipped, "informational; set ASA_LABR_PATH and ASA_FULL_LABR=1 to run"};
  }
  IngestConfig cfg;
  cfg.max_len = 256;
  const auto corpus = ingest_labr(*labr, cfg);
  ModelSpec spec;
  spec.architecture = Architecture::kBiLstm;
  spec.max_len = 256;
  TrainOptions opts;
  opts.on_epoch = [](const EpochStats& s) { std::cerr << "  LABR epoch " << s.epoch << " acc " << s.train_accuracy << "\n"; };
  auto result = train(spec, corpus, opts);
  const auto report = evaluate(result.network, corpus);
  const bool within = std::abs(report.test_accuracy - 0.88) <= 0.03 &&
                      std::abs(report.per_class[0].precision - 0.62) <= 0.03;
  return {Status::kInfo, "BiLSTM Model_ND test acc " + f(report.test_accuracy) + " (published 0.88), class-0 precision " +
                             f(report.per_class[0].precision) + " (published 0.62): " +
                             (within ? "within" : "outside") + " the +/-3 point band"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  fs::path work = fs::temp_directory_path() / "asa_acceptance";
  std::vector<int> only;
  app.add_option("--work-dir", work, "scratch directory");
  app.add_option("--only", only, "run only these criteria (1-8)");
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };

  DeskScale desk;
  desk.work = work / "desk";
  bool desk_ready = false;
  auto with_desk = [&](auto fn) {
    if (!desk_ready) {
      desk.prepare();
      desk_ready = true;
    }
    return fn(desk);
  };

  std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, gradient_correctness},
      {2, lime_oracle},
      {3, golden_counts},
      {4, [&] { return with_desk(desk_training); }},
      {5, [&] { return with_desk(noise_effect); }},
      {6, metric_arithmetic},
      {7, [&] { return determinism(work); }},
      {8, full_labr},
  };

  std::ostringstream summary;
  bool failed = false;
  for (const auto& [id, check] : criteria) {
    if (!wanted(id)) continue;
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {Status::kFail, std::string("threw: ") + e.what()};
    }
    failed = failed || outcome.status == Status::kFail;
    const std::string line = "criterion " + std::to_string(id) + ": " + label(outcome.status) + " - " + outcome.detail;
    std::cout << line << std::endl;
    summary << line << '\n';
  }
  fs::create_directories(work);
  std::ofstream(work / "acceptance_summary.txt") << summary.str();
  return failed ? 1 : 0;
}
