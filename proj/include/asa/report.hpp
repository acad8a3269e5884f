#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asa/lime.hpp"
#include "asa/training.hpp"

namespace asa::report {

/// One token of the explained review as rendered. `intensity` is |weight|
/// over the largest |weight| in the explanation; `sign` picks the colour
/// (+1 warm, toward positive; -1 cool, toward negative; 0 not highlighted).
struct TokenHighlight {
  std::string token;
  double intensity = 0.0;
  int sign = 0;
};

std::vector<TokenHighlight> highlight_tokens(const lime::Explanation& explanation);

/// Static right-to-left HTML page: highlighted review, probability bars and
/// the ranked token list. Only normalized weights appear, so scaling every
/// weight by a positive constant leaves the page unchanged.
std::string render_html(const lime::Explanation& explanation);

/// Terminal rendering; `ansi` adds 24-bit background colours.
std::string render_text(const lime::Explanation& explanation, bool ansi);

struct MetricsRow {
  std::string model;  // "BiLSTM" / "CNN-BiLSTM"
  std::string setup;  // "Model_ND" / "Model_N" / "Model_D"
  EvalReport report;
};

inline constexpr std::string_view kMetricsCsvHeader =
    "model,setup,train_acc,precision_0,recall_0,f1_0,precision_1,recall_1,f1_1,test_acc,overfit_percent";

std::string metrics_csv(std::span<const MetricsRow> rows);
/// Fixed-width table with percentages, one row per run.
std::string metrics_table(std::span<const MetricsRow> rows);

}  // namespace asa::report
