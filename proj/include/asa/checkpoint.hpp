#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "asa/network.hpp"
#include "asa/optimizer.hpp"
#include "asa/text_pipeline.hpp"

namespace asa {

struct CheckpointMeta {
  text::Vocabulary vocabulary;
  std::string vocab_hash;
  std::string corpus_path;
  std::string dataset_hash;
  std::size_t epochs_completed = 0;
};

struct Checkpoint {
  nn::Network network;
  CheckpointMeta meta;
  std::optional<AdamState> adam;
};

/// Layout: a magic line, the byte length of a JSON header, the header
/// (model spec, seed, vocabulary, parameter names and shapes), then raw
/// little-endian doubles for every parameter in header order, followed by
/// the Adam moments when present.
void save_checkpoint(const std::filesystem::path& path, const nn::Network& network, const CheckpointMeta& meta,
                     const AdamState* adam = nullptr);

/// Rejects files whose parameter list or shapes disagree with the network
/// the stored spec describes.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace asa
