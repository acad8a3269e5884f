#include "asa/report.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unordered_map>

namespace asa::report {
namespace {

struct Rgb {
  int r, g, b;
};
constexpr Rgb kWarm{255, 127, 14};
constexpr Rgb kCool{31, 119, 180};

double max_abs_weight(const lime::Explanation& e) {
  double m = 0.0;
  for (const auto& tw : e.token_weights) m = std::max(m, std::abs(tw.weight));
  return m;
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string rgba(const Rgb& c, double alpha) { return fmt::format("rgba({},{},{},{:.3f})", c.r, c.g, c.b, alpha); }

// Ranked (token, normalized weight) pairs, largest |weight| first.
std::vector<std::pair<std::string, double>> normalized_ranking(const lime::Explanation& e) {
  const double m = max_abs_weight(e);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& tw : e.token_weights) out.emplace_back(tw.token, m > 0.0 ? tw.weight / m : 0.0);
  return out;
}

}  // namespace

std::vector<TokenHighlight> highlight_tokens(const lime::Explanation& e) {
  const double m = max_abs_weight(e);
  std::unordered_map<std::string, double> weight;
  for (const auto& tw : e.token_weights) weight.emplace(tw.token, tw.weight);
  std::vector<TokenHighlight> out;
  for (const auto& token : text::tokenize(e.text)) {
    TokenHighlight h{token, 0.0, 0};
    if (const auto it = weight.find(token); it != weight.end() && m > 0.0 && it->second != 0.0) {
      h.intensity = std::abs(it->second) / m;
      h.sign = it->second > 0.0 ? 1 : -1;
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::string render_html(const lime::Explanation& e) {
  std::string html =
      "<!DOCTYPE html>\n<html lang=\"ar\" dir=\"rtl\">\n<head>\n<meta charset=\"utf-8\">\n"
      "<title>Explanation</title>\n<style>\n"
      "body{font-family:sans-serif;margin:2em;}\n"
      ".review{font-size:1.4em;line-height:2em;}\n"
      ".tok{padding:0.1em 0.2em;border-radius:0.2em;}\n"
      ".bar{display:inline-block;height:1em;vertical-align:middle;}\n"
      "table{border-collapse:collapse;}td{padding:0.2em 0.6em;}\n"
      "</style>\n</head>\n<body>\n";
  html += fmt::format("<h2>Review {}</h2>\n", escape_html(e.review_id));

  html += "<h3>Prediction probabilities</h3>\n<table class=\"probs\">\n";
  const std::pair<const char*, double> probs[] = {{"negative", e.p_negative}, {"positive", e.p_positive}};
  for (const auto& [name, p] : probs) {
    const Rgb c = std::string_view(name) == "positive" ? kWarm : kCool;
    html += fmt::format(
        "<tr><td>{}</td><td><span class=\"bar\" style=\"width:{:.1f}px;background:{}\"></span></td>"
        "<td>{:.4f}</td></tr>\n",
        name, 200.0 * p, rgba(c, 1.0), p);
  }
  html += "</table>\n";

  html += "<h3>Token weights</h3>\n<table class=\"weights\">\n";
  for (const auto& [token, w] : normalized_ranking(e)) {
    const Rgb c = w >= 0.0 ? kWarm : kCool;
    html += fmt::format(
        "<tr><td>{}</td><td><span class=\"bar\" style=\"width:{:.1f}px;background:{}\"></span></td>"
        "<td>{:+.4f}</td></tr>\n",
        escape_html(token), 200.0 * std::abs(w), rgba(c, 1.0), w);
  }
  html += "</table>\n";

  html += "<h3>Text with highlighted words</h3>\n<p class=\"review\">";
  bool first = true;
  for (const auto& h : highlight_tokens(e)) {
    if (!first) html += ' ';
    first = false;
    if (h.sign == 0) {
      html += fmt::format("<span class=\"tok\">{}</span>", escape_html(h.token));
    } else {
      html += fmt::format("<span class=\"tok\" style=\"background:{}\">{}</span>",
                          rgba(h.sign > 0 ? kWarm : kCool, h.intensity), escape_html(h.token));
    }
  }
  html += "</p>\n</body>\n</html>\n";
  return html;
}

std::string render_text(const lime::Explanation& e, bool ansi) {
  std::string out = fmt::format("review {}\n", e.review_id);
  out += fmt::format("p(negative) = {:.4f}\np(positive) = {:.4f}\n", e.p_negative, e.p_positive);
  out += "ranked tokens (normalized weight):\n";
  for (const auto& [token, w] : normalized_ranking(e)) out += fmt::format("  {:+.4f}  {}\n", w, token);
  out += "text:\n  ";
  bool first = true;
  for (const auto& h : highlight_tokens(e)) {
    if (!first) out += ' ';
    first = false;
    if (h.sign == 0) {
      out += h.token;
    } else if (ansi) {
      // Blend the hue toward white as intensity falls.
      const Rgb c = h.sign > 0 ? kWarm : kCool;
      auto mix = [&](int v) { return static_cast<int>(std::lround(255.0 - (255.0 - v) * h.intensity)); };
      out += fmt::format("\x1b[48;2;{};{};{}m{}\x1b[0m", mix(c.r), mix(c.g), mix(c.b), h.token);
    } else {
      out += fmt::format("{}[{}{:.2f}]", h.token, h.sign > 0 ? '+' : '-', h.intensity);
    }
  }
  out += '\n';
  return out;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out(kMetricsCsvHeader);
  out += '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.4f}\n", row.model, row.setup,
                       r.train_accuracy, r.per_class[0].precision, r.per_class[0].recall, r.per_class[0].f1,
                       r.per_class[1].precision, r.per_class[1].recall, r.per_class[1].f1, r.test_accuracy,
                       r.overfit_percent);
  }
  return out;
}

std::string metrics_table(std::span<const MetricsRow> rows) {
  std::string out = fmt::format("{:<11} {:<9} {:>9} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>8} {:>8}\n", "Model",
                                "Setup", "Train Acc", "P(0)", "R(0)", "F1(0)", "P(1)", "R(1)", "F1(1)", "Test Acc",
                                "Overfit");
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += fmt::format("{:<11} {:<9} {:>9.2f} {:>7.2f} {:>7.2f} {:>7.2f} {:>7.2f} {:>7.2f} {:>7.2f} {:>8.2f} {:>8.2f}\n",
                       row.model, row.setup, 100 * r.train_accuracy, 100 * r.per_class[0].precision,
                       100 * r.per_class[0].recall, 100 * r.per_class[0].f1, 100 * r.per_class[1].precision,
                       100 * r.per_class[1].recall, 100 * r.per_class[1].f1, 100 * r.test_accuracy,
                       r.overfit_percent);
  }
  return out;
}

}  // namespace asa::report
