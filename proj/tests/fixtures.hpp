#pragma once

// Small in-memory corpora and specs shared by the tests.

#include <string>
#include <vector>

#include "asa/corpus.hpp"
#include "asa/model_spec.hpp"

namespace asa::testing {

inline LabeledCorpus make_corpus(std::vector<RawReview> reviews, std::size_t max_len = 8,
                                 double train_fraction = 0.5, std::uint64_t seed = 3) {
  IngestConfig cfg;
  cfg.seed = seed;
  cfg.max_len = max_len;
  cfg.vocab_size = 50;
  cfg.train_fraction = train_fraction;
  return assemble_corpus("fixture", std::move(reviews), cfg);
}

// Positive reviews mention جيد or رائع, negative ones سيء or قذر.
inline std::vector<RawReview> toy_reviews(std::size_t n) {
  const char* pos[] = {"جيد", "رائع"};
  const char* neg[] = {"سيء", "قذر"};
  const char* filler[] = {"الفندق", "الغرفه", "الخدمه", "الموقع", "كان", "جدا"};
  std::vector<RawReview> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    std::string text = std::string(filler[i % 6]) + " " + (label ? pos[(i / 2) % 2] : neg[(i / 2) % 2]) + " " +
                       filler[(i + 3) % 6];
    out.push_back({"doc" + std::to_string(i), text, label});
  }
  return out;
}

inline ModelSpec small_spec(std::size_t max_len = 8) {
  ModelSpec spec;
  spec.vocab_size = 50;
  spec.embed_dim = 8;
  spec.max_len = max_len;
  spec.hidden = 6;
  spec.filters = 6;
  spec.kernel = 3;
  spec.dense_sizes = {16, 8, 8, 1};
  spec.batch = 4;
  spec.epochs = 3;
  spec.seed = 7;
  return spec;
}

}  // namespace asa::testing
