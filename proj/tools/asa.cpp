// asa: prepare corpora, train and evaluate the sentiment networks, explain
// predictions and run the architecture x setup experiment matrix.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asa/commands.hpp"
#include "asa/config.hpp"
#include "asa/errors.hpp"

namespace {

using asa::cli::exit_code_for;

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw asa::UsageError("invalid seed '" + text + "'");
  }
}

// Model flags shared by train and experiment; every value lands in the
// override map so it beats the config file.
struct RunFlags {
  std::string config;
  std::string corpus;
  std::string out;
  std::string seed;
  std::string epochs;
  std::vector<std::string> sets;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "key = value run configuration file");
    app->add_option("--corpus", corpus, "prepared corpus directory");
    app->add_option("--out", out, "output directory");
    app->add_option("--seed", seed, "global seed");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--set", sets, "extra KEY=VALUE override (repeatable)");
  }

  asa::RunConfig resolve(std::map<std::string, std::string> overrides) const {
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw asa::UsageError("--set expects KEY=VALUE, got '" + kv + "'");
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!corpus.empty()) overrides["corpus"] = corpus;
    if (!out.empty()) overrides["out"] = out;
    if (!seed.empty()) overrides["seed"] = seed;
    if (!epochs.empty()) overrides["epochs"] = epochs;
    std::optional<std::filesystem::path> file;
    if (!config.empty()) file = config;
    return asa::resolve_run_config(file, overrides, asa::seed_from_environment());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arabic sentiment analysis: BiLSTM / CNN-BiLSTM training with LIME explanations"};
  app.require_subcommand(1);

  asa::cli::PrepareOptions prep;
  std::string prep_seed, prep_input, prep_out;
  double prep_fraction = 0.0;
  std::size_t prep_max_len = 0;
  bool prep_no_check = false;
  auto* prepare = app.add_subcommand("prepare", "ingest a LABR or HTL file into a corpus directory");
  prepare->add_option("--dataset", prep.dataset, "labr or htl")->required()->check(CLI::IsMember({"labr", "htl"}));
  prepare->add_option("--input", prep_input, "source review file")->required();
  prepare->add_option("--out", prep_out, "corpus directory to write")->required();
  prepare->add_flag("--balance", prep.balance, "down-sample the majority class");
  prepare->add_option("--seed", prep_seed, "seed for balancing and the split");
  auto* max_len_opt = prepare->add_option("--max-len", prep_max_len, "padded sequence length (256 LABR, 128 HTL)");
  prepare->add_option("--vocab-size", prep.vocab_size, "vocabulary cap");
  auto* fraction_opt = prepare->add_option("--train-fraction", prep_fraction, "training share (0.8 LABR, 0.75 HTL)");
  prepare->add_flag("--no-count-check", prep_no_check, "skip the published-count warnings");

  RunFlags train_flags;
  std::string train_arch, train_setup;
  bool train_resume = false;
  auto* train = app.add_subcommand("train", "train one model");
  train_flags.add_to(train);
  train->add_option("--arch", train_arch, "BiLSTM or CNN-BiLSTM");
  train->add_option("--setup", train_setup, "ND, N or D");
  train->add_flag("--resume", train_resume, "continue the checkpoint in the output directory");

  asa::cli::EvaluateOptions eval;
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on both splits of a corpus");
  evaluate->add_option("--checkpoint", eval.checkpoint, "checkpoint file")->required();
  evaluate->add_option("--corpus", eval.corpus, "corpus directory")->required();
  evaluate->add_option("--out", eval_out, "directory for metrics.csv and metrics.txt");

  asa::cli::ExplainOptions expl;
  std::string expl_text, expl_corpus, expl_seed;
  std::size_t expl_id = 0;
  auto* explain = app.add_subcommand("explain", "explain one prediction with LIME");
  explain->add_option("--checkpoint", expl.checkpoint, "checkpoint file")->required();
  auto* text_opt = explain->add_option("--text", expl_text, "review text");
  auto* id_opt = explain->add_option("--id", expl_id, "document index in the corpus");
  text_opt->excludes(id_opt);
  explain->add_option("--corpus", expl_corpus, "corpus directory for --id (default: the checkpoint's)");
  explain->add_option("--out", expl.out, "report directory")->required();
  explain->add_option("--samples", expl.lime.num_samples, "perturbation samples");
  explain->add_option("--kernel-width", expl.lime.kernel_width, "proximity kernel width");
  explain->add_option("--ridge", expl.lime.ridge_penalty, "ridge penalty");
  explain->add_option("--top-k", expl.lime.top_k, "reported features");
  explain->add_option("--seed", expl_seed, "sampling seed");

  RunFlags exp_flags;
  std::vector<std::string> exp_only;
  auto* experiment = app.add_subcommand("experiment", "train and evaluate every architecture x setup");
  exp_flags.add_to(experiment);
  experiment->add_option("--only", exp_only, "restrict to ARCH:SETUP (repeatable)");

  asa::cli::SynthesizeOptions synth;
  std::string synth_out;
  auto* synthesize = app.add_subcommand("synthesize", "write a synthetic HTL-format review file");
  synthesize->add_option("--out", synth_out, "output TSV")->required();
  synthesize->add_option("--seed", synth.config.seed, "generator seed");
  synthesize->add_option("--positives", synth.config.positives, "positive reviews");
  synthesize->add_option("--negatives", synth.config.negatives, "negative reviews");
  synthesize->add_option("--neutrals", synth.config.neutrals, "neutral reviews");
  synthesize->add_option("--label-noise", synth.config.label_noise, "share of flipped labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*prepare) {
      prep.input = prep_input;
      prep.out = prep_out;
      if (!prep_seed.empty()) {
        prep.seed = parse_seed(prep_seed);
      } else if (const auto env = asa::seed_from_environment()) {
        prep.seed = parse_seed(*env);
      }
      if (*fraction_opt) prep.train_fraction = prep_fraction;
      if (*max_len_opt) prep.max_len = prep_max_len;
      prep.check_expected_counts = !prep_no_check;
      asa::cli::cmd_prepare(prep, std::cout);
    } else if (*train) {
      std::map<std::string, std::string> overrides;
      if (!train_arch.empty()) overrides["architecture"] = train_arch;
      if (!train_setup.empty()) overrides["setup"] = train_setup;
      asa::cli::cmd_train({train_flags.resolve(overrides), train_resume}, std::cout);
    } else if (*evaluate) {
      if (!eval_out.empty()) eval.out = eval_out;
      asa::cli::cmd_evaluate(eval, std::cout);
    } else if (*explain) {
      if (*text_opt) expl.text = expl_text;
      if (*id_opt) expl.id = expl_id;
      if (!expl_corpus.empty()) expl.corpus = expl_corpus;
      if (!expl_seed.empty()) {
        expl.lime.seed = parse_seed(expl_seed);
      } else if (const auto env = asa::seed_from_environment()) {
        expl.lime.seed = parse_seed(*env);
      }
      expl.lime.validate();
      asa::cli::cmd_explain(expl, std::cout);
    } else if (*experiment) {
      asa::cli::ExperimentOptions opts{exp_flags.resolve({}), {}};
      for (const auto& c : exp_only) opts.only.push_back(asa::cli::parse_combination(c));
      asa::cli::cmd_experiment(opts, std::cout);
    } else if (*synthesize) {
      synth.out = synth_out;
      asa::cli::cmd_synthesize(synth, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
