#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "json.hpp"
#include "asa/commands.hpp"
#include "asa/config.hpp"
#include "asa/errors.hpp"
#include "asa/lime.hpp"
#include "asa/synthetic.hpp"
#include "asa/text_pipeline.hpp"
#include "asa/training.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace asa;

namespace {

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["train_accuracy"] = r.train_accuracy;
  d["test_accuracy"] = r.test_accuracy;
  d["overfit_percent"] = r.overfit_percent;
  py::list classes;
  for (const auto& c : r.per_class) {
    py::dict m;
    m["precision"] = c.precision;
    m["recall"] = c.recall;
    m["f1"] = c.f1;
    m["support"] = c.support;
    classes.append(m);
  }
  d["per_class"] = classes;
  return d;
}

py::object explanation_dict(const lime::Explanation& e) {
  return py::module_::import("json").attr("loads")(lime::to_json(e));
}

lime::LimeConfig lime_config(std::size_t num_samples, double kernel_width, double ridge, std::size_t top_k,
                             std::uint64_t seed) {
  lime::LimeConfig cfg;
  cfg.num_samples = num_samples;
  cfg.kernel_width = kernel_width;
  cfg.ridge_penalty = ridge;
  cfg.top_k = top_k;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Arabic sentiment classification with noise-regularized BiLSTM models and LIME explanations";

  static py::exception<Error> error(m, "AsaError");
  static py::exception<UsageError> usage_error(m, "UsageError", error.ptr());
  static py::exception<DataError> data_error(m, "DataError", error.ptr());
  static py::exception<NumericError> numeric_error(m, "NumericError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      usage_error(e.what());
    } catch (const DataError& e) {
      data_error(e.what());
    } catch (const NumericError& e) {
      numeric_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("normalize", [](const std::string& s) { return text::normalize(s); }, py::arg("text"));
  m.def("tokenize", [](const std::string& s) { return text::tokenize(text::normalize(s)); }, py::arg("text"),
        "normalize then split into tokens");
  m.def("overfit_percent", &overfit_percent, py::arg("train_accuracy"), py::arg("test_accuracy"));

  m.def(
      "synthesize",
      [](const fs::path& out, std::size_t positives, std::size_t negatives, std::size_t neutrals, std::uint64_t seed) {
        synthetic::SyntheticConfig cfg;
        cfg.positives = positives;
        cfg.negatives = negatives;
        cfg.neutrals = neutrals;
        cfg.seed = seed;
        synthetic::write_htl_tsv(out, cfg);
      },
      py::arg("out"), py::arg("positives") = 4000, py::arg("negatives") = 2645, py::arg("neutrals") = 500,
      py::arg("seed") = 7, "write a synthetic HTL-format review file");

  m.def(
      "prepare",
      [](const std::string& dataset, const fs::path& input, const fs::path& out, bool balance, std::uint64_t seed,
         std::optional<std::size_t> max_len, std::size_t vocab_size, std::optional<double> train_fraction) {
        cli::PrepareOptions o;
        o.dataset = dataset;
        o.input = input;
        o.out = out;
        o.balance = balance;
        o.seed = seed;
        o.max_len = max_len;
        o.vocab_size = vocab_size;
        o.train_fraction = train_fraction;
        o.check_expected_counts = false;
        std::ostringstream log;
        const auto corpus = cli::cmd_prepare(o, log);
        py::dict d;
        d["documents"] = corpus.documents.size();
        d["train"] = corpus.train.size();
        d["test"] = corpus.test.size();
        d["vocabulary"] = corpus.vocabulary.size();
        d["vocabulary_hash"] = corpus.vocabulary_hash();
        return d;
      },
      py::arg("dataset"), py::arg("input"), py::arg("out"), py::arg("balance") = false, py::arg("seed") = 42,
      py::arg("max_len") = py::none(), py::arg("vocab_size") = 10000, py::arg("train_fraction") = py::none());

  m.def(
      "train",
      [](const std::map<std::string, std::string>& config, bool resume) {
        cli::TrainCommandOptions o;
        o.config.apply(config);
        o.resume = resume;
        std::ostringstream log;
        TrainResult result = [&] {
          py::gil_scoped_release release;
          return cli::cmd_train(o, log);
        }();
        py::list trace;
        for (const auto& s : result.trace) {
          py::dict e;
          e["epoch"] = s.epoch;
          e["train_loss"] = s.train_loss;
          e["train_accuracy"] = s.train_accuracy;
          trace.append(e);
        }
        return trace;
      },
      py::arg("config"), py::arg("resume") = false,
      "train with key/value settings (same keys as a config file); returns the epoch trace");

  m.def(
      "evaluate",
      [](const fs::path& checkpoint, const fs::path& corpus, std::optional<fs::path> out) {
        std::ostringstream log;
        return report_dict(cli::cmd_evaluate({checkpoint, corpus, out}, log));
      },
      py::arg("checkpoint"), py::arg("corpus"), py::arg("out") = py::none());

  m.def(
      "explain_checkpoint",
      [](const fs::path& checkpoint, const std::string& text, const fs::path& out, std::size_t num_samples,
         double kernel_width, double ridge, std::size_t top_k, std::uint64_t seed) {
        cli::ExplainOptions o;
        o.checkpoint = checkpoint;
        o.text = text;
        o.out = out;
        o.lime = lime_config(num_samples, kernel_width, ridge, top_k, seed);
        std::ostringstream log;
        return explanation_dict(cli::cmd_explain(o, log));
      },
      py::arg("checkpoint"), py::arg("text"), py::arg("out"), py::arg("num_samples") = 1000,
      py::arg("kernel_width") = 25.0, py::arg("ridge") = 1.0, py::arg("top_k") = 10, py::arg("seed") = 42);

  m.def(
      "explain",
      [](const std::string& text, const lime::Classifier& classifier, std::size_t num_samples, double kernel_width,
         double ridge, std::size_t top_k, std::uint64_t seed) {
        return explanation_dict(lime::explain(text, classifier, lime_config(num_samples, kernel_width, ridge, top_k, seed)));
      },
      py::arg("text"), py::arg("classifier"), py::arg("num_samples") = 1000, py::arg("kernel_width") = 25.0,
      py::arg("ridge") = 1.0, py::arg("top_k") = 10, py::arg("seed") = 42,
      "LIME for any classifier mapping a list of texts to positive-class probabilities");

  m.def(
      "fit_surrogate",
      [](const std::vector<std::vector<std::uint8_t>>& masks, const std::vector<double>& labels,
         const std::vector<double>& weights, double ridge, std::size_t top_k) {
        lime::LimeConfig cfg;
        cfg.ridge_penalty = ridge;
        cfg.top_k = top_k;
        const auto fit = lime::fit_surrogate(masks, labels, weights, cfg);
        py::dict d;
        d["features"] = fit.features;
        d["coefficients"] = fit.coefficients;
        d["intercept"] = fit.intercept;
        d["local_fidelity"] = fit.local_fidelity;
        return d;
      },
      py::arg("masks"), py::arg("labels"), py::arg("weights"), py::arg("ridge") = 1.0, py::arg("top_k") = 10);
}
