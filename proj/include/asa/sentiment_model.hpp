#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "asa/lime.hpp"
#include "asa/network.hpp"
#include "asa/text_pipeline.hpp"

namespace asa {

/// A trained network plus the vocabulary it was trained with, scoring raw
/// text. Texts go through the same normalize/tokenize/encode path as the
/// training corpus.
class SentimentModel {
 public:
  SentimentModel(nn::Network network, text::Vocabulary vocabulary);

  /// Positive-class probabilities, evaluated in inference mode in batches.
  std::vector<double> predict(const std::vector<std::string>& texts, std::size_t batch_size = 256);

  /// Black-box view for the explainer. The returned callable refers to this
  /// model, which must outlive it.
  lime::Classifier classifier();

  nn::Network& network() { return network_; }
  const text::Vocabulary& vocabulary() const { return vocabulary_; }

 private:
  nn::Network network_;
  text::Vocabulary vocabulary_;
};

}  // namespace asa
