#include "asa/sentiment_model.hpp"

#include <algorithm>

namespace asa {

SentimentModel::SentimentModel(nn::Network network, text::Vocabulary vocabulary)
    : network_(std::move(network)), vocabulary_(std::move(vocabulary)) {}

std::vector<double> SentimentModel::predict(const std::vector<std::string>& texts, std::size_t batch_size) {
  const std::size_t max_len = network_.spec().max_len;
  std::vector<double> out;
  out.reserve(texts.size());
  std::vector<text::EncodedSequence> chunk;
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    chunk.clear();
    for (std::size_t i = start; i < end; ++i) chunk.push_back(text::encode_text(texts[i], vocabulary_, max_len));
    const auto probs = network_.predict(nn::make_batch(chunk));
    out.insert(out.end(), probs.begin(), probs.end());
  }
  return out;
}

lime::Classifier SentimentModel::classifier() {
  return [this](const std::vector<std::string>& texts) { return predict(texts); };
}

}  // namespace asa
