#include "asa/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "json.hpp"

#include "asa/errors.hpp"

namespace asa {
namespace {

using json = nlohmann::json;
constexpr std::string_view kMagic = "ASA-CHECKPOINT 1";

void write_values(std::ofstream& out, const nn::Tensor& t) {
  out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_values(std::ifstream& in, nn::Tensor& t, const std::string& what) {
  in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(t.size() * sizeof(double))) {
    throw DataError("checkpoint truncated while reading " + what);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const nn::Network& network, const CheckpointMeta& meta,
                     const AdamState* adam) {
  static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian doubles");
  json params = json::array();
  for (const nn::Param* p : network.parameters()) params.push_back({{"name", p->name}, {"shape", p->value.shape()}});
  json header = {
      {"format", 1},
      {"layers", network.layer_names()},
      {"spec", network.spec().to_key_values()},
      {"seed", network.spec().seed},
      {"params", params},
      {"vocabulary", meta.vocabulary.tokens()},
      {"vocab_max_size", meta.vocabulary.max_size()},
      {"vocab_hash", meta.vocab_hash},
      {"corpus", meta.corpus_path},
      {"dataset_hash", meta.dataset_hash},
      {"epochs_completed", meta.epochs_completed},
      {"adam_step", adam ? json(adam->step) : json(nullptr)},
  };
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << kMagic << '\n' << text.size() << '\n' << text;
  for (const nn::Param* p : network.parameters()) write_values(out, p->value);
  if (adam) {
    for (const auto& m : adam->m) write_values(out, m);
    for (const auto& v : adam->v) write_values(out, v);
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  std::string magic, length_line;
  std::getline(in, magic);
  if (magic != kMagic) throw DataError(path.string() + " is not a checkpoint file");
  std::getline(in, length_line);
  std::size_t length = 0;
  try {
    length = std::stoull(length_line);
  } catch (const std::exception&) {
    throw DataError("checkpoint header length is corrupt");
  }
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (in.gcount() != static_cast<std::streamsize>(length)) throw DataError("checkpoint header truncated");

  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError("checkpoint header is not valid JSON: " + std::string(e.what()));
  }

  try {
    ModelSpec spec;
    for (const auto& [key, value] : header.at("spec").items()) {
      if (!spec.set(key, value.get<std::string>())) throw DataError("checkpoint spec has unknown key " + key);
    }
    nn::Network network(spec);

    const auto& stored = header.at("params");
    auto params = network.parameters();
    if (stored.size() != params.size()) {
      throw DataError("checkpoint stores " + std::to_string(stored.size()) + " parameter tensors, the spec needs " +
                      std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto name = stored[i].at("name").get<std::string>();
      const auto shape = stored[i].at("shape").get<nn::Tensor::Shape>();
      if (name != params[i]->name || shape != params[i]->value.shape()) {
        throw DataError("checkpoint parameter " + name + " " + nn::shape_to_string(shape) + " does not match " +
                        params[i]->name + " " + nn::shape_to_string(params[i]->value.shape()));
      }
      read_values(in, params[i]->value, name);
    }

    CheckpointMeta meta;
    text::Vocabulary vocab(header.at("vocab_max_size").get<std::size_t>());
    for (const auto& token : header.at("vocabulary")) vocab.add(token.get<std::string>());
    meta.vocabulary = std::move(vocab);
    meta.vocab_hash = header.at("vocab_hash").get<std::string>();
    meta.corpus_path = header.at("corpus").get<std::string>();
    meta.dataset_hash = header.at("dataset_hash").get<std::string>();
    meta.epochs_completed = header.at("epochs_completed").get<std::size_t>();

    std::optional<AdamState> adam;
    if (!header.at("adam_step").is_null()) {
      AdamState state = AdamState::for_params(params);
      state.step = header.at("adam_step").get<std::uint64_t>();
      for (std::size_t i = 0; i < params.size(); ++i) read_values(in, state.m[i], "adam m");
      for (std::size_t i = 0; i < params.size(); ++i) read_values(in, state.v[i], "adam v");
      adam = std::move(state);
    }
    return Checkpoint{std::move(network), std::move(meta), std::move(adam)};
  } catch (const json::exception& e) {
    throw DataError("checkpoint header is incomplete: " + std::string(e.what()));
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint spec is invalid: ") + e.what());
  }
}

}  // namespace asa
