#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "asa/config.hpp"
#include "asa/errors.hpp"
#include "asa/report.hpp"

using namespace asa;

namespace {

lime::Explanation sample_explanation(double scale = 1.0) {
  lime::Explanation e;
  e.review_id = "t1";
  e.text = "الفندق جيد لكن الغرفه سيء";
  e.token_weights = {{"جيد", 0.4 * scale}, {"سيء", -0.2 * scale}};
  e.intercept = 0.5;
  e.local_fidelity = 0.8;
  e.p_negative = 0.3;
  e.p_positive = 0.7;
  e.feature_count = 5;
  return e;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

TEST_CASE("token highlights scale by the largest weight and carry its sign") {
  const auto h = report::highlight_tokens(sample_explanation());
  REQUIRE(h.size() == 5);
  CHECK(h[0].sign == 0);
  CHECK(h[0].intensity == 0.0);
  CHECK(h[1].token == "جيد");
  CHECK(h[1].sign == 1);
  CHECK(h[1].intensity == doctest::Approx(1.0));
  CHECK(h[4].token == "سيء");
  CHECK(h[4].sign == -1);
  CHECK(h[4].intensity == doctest::Approx(0.5));

  auto flat = sample_explanation();
  for (auto& tw : flat.token_weights) tw.weight = 0.0;
  for (const auto& t : report::highlight_tokens(flat)) {
    CHECK(t.sign == 0);
    CHECK(t.intensity == 0.0);
  }
}

TEST_CASE("HTML rendering is right-to-left, coloured by sign and scale invariant") {
  const auto html = report::render_html(sample_explanation());
  CHECK(html.find("dir=\"rtl\"") != std::string::npos);
  CHECK(html.find("rgba(255,127,14,1.000)") != std::string::npos);
  CHECK(html.find("rgba(31,119,180,0.500)") != std::string::npos);
  CHECK(html.find("جيد") != std::string::npos);
  CHECK(report::render_html(sample_explanation(3.0)) == html);
  CHECK(report::render_html(sample_explanation(0.01)) == html);

  const auto text = report::render_text(sample_explanation(), false);
  CHECK(text.find("\x1b[") == std::string::npos);
  CHECK(text.find("جيد") != std::string::npos);
  CHECK(report::render_text(sample_explanation(), true).find("\x1b[") != std::string::npos);
}

TEST_CASE("metrics CSV has the fixed header and column order") {
  ConfusionMatrix train{45, 5, 45, 5};
  ConfusionMatrix test{30, 20, 40, 10};  // tp, fp, tn, fn
  const std::vector<report::MetricsRow> rows = {{"CNN-BiLSTM", "Model_ND", make_report(train, test)}};
  const auto csv = report::metrics_csv(rows);
  const double p1 = 30.0 / 50.0, r1 = 30.0 / 40.0, p0 = 40.0 / 50.0, r0 = 40.0 / 60.0;
  const std::string expected = std::string(report::kMetricsCsvHeader) + "\n" + "CNN-BiLSTM,Model_ND," +
                               fixed(0.9, 6) + "," + fixed(p0, 6) + "," + fixed(r0, 6) + "," +
                               fixed(2 * p0 * r0 / (p0 + r0), 6) + "," + fixed(p1, 6) + "," + fixed(r1, 6) + "," +
                               fixed(2 * p1 * r1 / (p1 + r1), 6) + "," + fixed(0.7, 6) + "," + fixed(20.0, 4) + "\n";
  CHECK(csv == expected);
  CHECK(csv.rfind(
            "model,setup,train_acc,precision_0,recall_0,f1_0,precision_1,recall_1,f1_1,test_acc,overfit_percent\n", 0) ==
        0);

  const auto table = report::metrics_table(rows);
  CHECK(table.find("90.00") != std::string::npos);
  CHECK(table.find("20.00") != std::string::npos);
}

TEST_CASE("key/value config parsing") {
  const auto kv = parse_key_values("# comment\n\nseed = 5\n epochs=3 \nseed = 9\n");
  CHECK(kv.at("seed") == "9");
  CHECK(kv.at("epochs") == "3");
  try {
    parse_key_values("seed = 1\nnot a pair\n");
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown config keys are all reported at once") {
  RunConfig cfg;
  try {
    cfg.apply({{"seed", "1"}, {"bogus_one", "1"}, {"bogus_two", "2"}});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus_one") != std::string::npos);
    CHECK(msg.find("bogus_two") != std::string::npos);
  }
  for (const auto& [key, value] : RunConfig{}.to_key_values()) {
    CHECK(std::find(RunConfig::keys().begin(), RunConfig::keys().end(), key) != RunConfig::keys().end());
  }
}

TEST_CASE("config precedence is CLI > environment > file > default") {
  const auto path = std::filesystem::temp_directory_path() / "asa_config_test.cfg";
  {
    std::ofstream(path) << "seed = 11\nepochs = 4\nlime_top_k = 6\n";
  }
  const RunConfig defaults;
  const auto from_file = resolve_run_config(path, {}, std::nullopt);
  CHECK(from_file.spec.seed == 11);
  CHECK(from_file.spec.epochs == 4);
  CHECK(from_file.lime.top_k == 6);
  CHECK(from_file.lime.seed == 11);
  CHECK(from_file.spec.batch == defaults.spec.batch);

  const auto env = resolve_run_config(path, {}, std::string("23"));
  CHECK(env.spec.seed == 23);
  CHECK(env.spec.epochs == 4);

  const auto cli = resolve_run_config(path, {{"seed", "31"}, {"epochs", "2"}}, std::string("23"));
  CHECK(cli.spec.seed == 31);
  CHECK(cli.spec.epochs == 2);

  CHECK(resolve_run_config(std::nullopt, {}, std::nullopt).spec.seed == defaults.spec.seed);
  CHECK_THROWS_AS(resolve_run_config(path, {}, std::string("abc")), UsageError);
  std::filesystem::remove(path);
}
