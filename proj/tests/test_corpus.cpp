#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "asa/corpus.hpp"
#include "asa/errors.hpp"
#include "fixtures.hpp"

using namespace asa;

TEST_CASE("LABR ratings map to binary labels and 3 is dropped") {
  std::istringstream in(
      "1\tb1\tu1\tالفندق سيء\n"
      "2\tb2\tu2\tكان قذر\n"
      "3\tb3\tu3\tعادي\n"
      "4\tb4\tu4\tجيد\n"
      "5\tb5\tu5\tرائع جدا\n");
  IngestStats stats;
  const auto reviews = read_labr(in, IngestConfig{}, stats);
  REQUIRE(reviews.size() == 4);
  std::vector<int> labels;
  for (const auto& r : reviews) labels.push_back(r.label);
  CHECK(labels == std::vector<int>{0, 0, 1, 1});
  CHECK(stats.dropped_neutral == 1);
  CHECK(reviews.back().text == "رائع جدا");
}

TEST_CASE("LABR rejects ratings outside 1-5 with the line number") {
  std::istringstream in("4\tجيد\n7\tغريب\n");
  IngestStats stats;
  try {
    read_labr(in, IngestConfig{}, stats);
    FAIL("expected MalformedRecordError");
  } catch (const MalformedRecordError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream bad("x\tنص\n");
  CHECK_THROWS_AS(read_labr(bad, IngestConfig{}, stats), MalformedRecordError);
  for (const int r : {0, 6, -1}) CHECK_THROWS_AS(map_labr_label(r), MalformedRecordError);
}

TEST_CASE("HTL polarity tags, neutral dropping and balancing") {
  const std::string data =
      "polarity\ttext\n"
      "positive\tالفندق رائع\n"
      "positive\tجيد جدا\n"
      "neutral\tعادي\n"
      "negative\tسيء\n"
      "positive\tمريح\n";
  std::istringstream in(data);
  IngestStats stats;
  auto reviews = read_htl(in, IngestConfig{}, stats);
  CHECK(reviews.size() == 4);
  CHECK(stats.dropped_neutral == 1);
  const auto balanced = balance_classes(reviews, 42, stats);
  REQUIRE(balanced.size() == 2);
  std::multiset<int> labels;
  for (const auto& r : balanced) labels.insert(r.label);
  CHECK(labels == std::multiset<int>{0, 1});
  CHECK(stats.dropped_balance == 2);
  CHECK(balance_classes(reviews, 42, stats).front().text == balanced.front().text);

  std::istringstream missing("polarity\ttext\n\tنص بلا وسم\n");
  CHECK_THROWS_AS(read_htl(missing, IngestConfig{}, stats), MalformedRecordError);
  std::istringstream no_column("label,text\npositive,جيد\n");
  CHECK_THROWS_AS(read_htl(no_column, IngestConfig{}, stats), MalformedRecordError);
  std::istringstream unknown("polarity,text\nmaybe,جيد\n");
  CHECK_THROWS_AS(read_htl(unknown, IngestConfig{}, stats), MalformedRecordError);
}

TEST_CASE("corpus assembly is deterministic and round-trips through disk") {
  auto reviews = testing::toy_reviews(40);
  reviews.push_back({"empty", "!!!", 1});
  const auto a = testing::make_corpus(reviews);
  const auto b = testing::make_corpus(reviews);
  CHECK(a.documents.size() == 40);
  CHECK(a.stats.dropped_empty == 1);
  CHECK(a.train == b.train);
  CHECK(a.vocabulary_hash() == b.vocabulary_hash());
  CHECK(a.train.size() == 20);

  // The vocabulary only sees training documents.
  std::set<std::string> train_tokens;
  for (const auto i : a.train) {
    std::istringstream words(a.documents[i].text);
    for (std::string w; words >> w;) train_tokens.insert(w);
  }
  for (const auto& tok : a.vocabulary.tokens()) CHECK(train_tokens.count(tok) == 1);

  const auto dir = std::filesystem::temp_directory_path() / "asa_corpus_roundtrip";
  std::filesystem::remove_all(dir);
  save_corpus(a, dir);
  const auto loaded = load_corpus(dir);
  CHECK(loaded.vocabulary_hash() == a.vocabulary_hash());
  CHECK(loaded.train == a.train);
  CHECK(loaded.test == a.test);
  REQUIRE(loaded.documents.size() == a.documents.size());
  for (std::size_t i = 0; i < a.documents.size(); ++i) {
    CHECK(loaded.documents[i].label == a.documents[i].label);
    CHECK(loaded.documents[i].sequence == a.documents[i].sequence);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_corpus(dir), DataError);
}
