#include "asa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "asa/errors.hpp"
#include "asa/hash.hpp"
#include "asa/partition.hpp"
#include "asa/rng.hpp"

namespace asa {
namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Reads one delimited record honouring double quotes (which may span lines).
// Returns false at end of input.
bool read_record(std::istream& in, char delimiter, std::size_t& line_no, Record& record) {
  record.fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  record.line = line_no;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (quoted) {
        if (!std::getline(in, line)) throw MalformedRecordError(record.line, "unterminated quoted field");
        ++line_no;
        field += '\n';
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      record.fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || i + 1 != line.size()) {
      field += c;
    }
    ++i;
  }
  record.fields.push_back(std::move(field));
  return true;
}

void check_counts(const LabeledCorpus& corpus, const ExpectedCounts& expected, IngestStats& stats) {
  const auto check = [&](const char* what, std::size_t observed, std::size_t wanted) {
    if (observed != wanted) {
      stats.warnings.push_back(std::string(what) + ": observed " + std::to_string(observed) +
                               ", published " + std::to_string(wanted));
    }
  };
  check("kept documents", corpus.documents.size(), expected.kept);
  check("positive", corpus.stats.positive, expected.positive);
  check("negative", corpus.stats.negative, expected.negative);
  check("training split", corpus.train.size(), expected.train);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read dataset file " + path.string());
  return in;
}

}  // namespace

std::string IngestConfig::describe() const {
  std::ostringstream os;
  os << "seed=" << seed << ";max_len=" << max_len << ";vocab_size=" << vocab_size
     << ";train_fraction=" << train_fraction << ";balance=" << balance << ";rating_column=" << rating_column
     << ";labr_text_column=" << labr_text_column << ";polarity_column=" << polarity_column
     << ";text_column=" << text_column << ";delimiter=" << static_cast<int>(delimiter);
  return os.str();
}

std::optional<int> map_labr_label(int rating, std::size_t line) {
  switch (rating) {
    case 1:
    case 2:
      return 0;
    case 3:
      return std::nullopt;
    case 4:
    case 5:
      return 1;
    default:
      throw MalformedRecordError(line, "rating " + std::to_string(rating) + " outside 1-5");
  }
}

std::optional<int> map_htl_polarity(std::string_view tag, std::size_t line) {
  const std::string t = lower(trim(tag));
  if (t == "positive" || t == "pos" || t == "1" || t == "+1") return 1;
  if (t == "negative" || t == "neg" || t == "-1") return 0;
  if (t == "neutral" || t == "neu" || t == "mixed" || t == "0") return std::nullopt;
  if (t.empty()) throw MalformedRecordError(line, "missing polarity");
  throw MalformedRecordError(line, "unknown polarity '" + std::string(tag) + "'");
}

std::vector<RawReview> read_labr(std::istream& in, const IngestConfig& config, IngestStats& stats) {
  std::vector<RawReview> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::size_t text_col =
        config.labr_text_column < 0 ? fields.size() - 1 : static_cast<std::size_t>(config.labr_text_column);
    if (config.rating_column >= fields.size() || text_col >= fields.size()) {
      throw MalformedRecordError(line_no, "expected at least " +
                                              std::to_string(std::max(config.rating_column, text_col) + 1) +
                                              " tab-separated fields");
    }
    const std::string rating_text = trim(fields[config.rating_column]);
    int rating = 0;
    try {
      std::size_t used = 0;
      rating = std::stoi(rating_text, &used);
      if (used != rating_text.size()) throw std::invalid_argument(rating_text);
    } catch (const std::exception&) {
      throw MalformedRecordError(line_no, "rating '" + rating_text + "' is not an integer");
    }
    ++stats.records;
    const auto label = map_labr_label(rating, line_no);
    if (!label) {
      ++stats.dropped_neutral;
      continue;
    }
    out.push_back({"labr:" + std::to_string(line_no), fields[text_col], *label});
  }
  return out;
}

std::vector<RawReview> read_htl(std::istream& in, const IngestConfig& config, IngestStats& stats) {
  std::string header_line;
  std::size_t line_no = 0;
  if (!std::getline(in, header_line)) throw DataError("HTL input is empty");
  ++line_no;
  char delimiter = config.delimiter;
  if (delimiter == '\0') delimiter = header_line.find('\t') != std::string::npos ? '\t' : ',';
  std::istringstream header_stream(header_line);
  Record header;
  std::size_t header_line_no = 0;
  read_record(header_stream, delimiter, header_line_no, header);
  std::optional<std::size_t> polarity_col, text_col;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    const std::string name = lower(trim(header.fields[i]));
    if (name == lower(config.polarity_column)) polarity_col = i;
    if (name == lower(config.text_column)) text_col = i;
  }
  if (!polarity_col) throw MalformedRecordError(1, "header lacks polarity column '" + config.polarity_column + "'");
  if (!text_col) throw MalformedRecordError(1, "header lacks text column '" + config.text_column + "'");

  std::vector<RawReview> out;
  Record record;
  while (read_record(in, delimiter, line_no, record)) {
    if (record.fields.size() == 1 && trim(record.fields[0]).empty()) continue;
    if (*polarity_col >= record.fields.size()) throw MalformedRecordError(record.line, "missing polarity field");
    ++stats.records;
    const auto label = map_htl_polarity(record.fields[*polarity_col], record.line);
    if (!label) {
      ++stats.dropped_neutral;
      continue;
    }
    const std::string text = *text_col < record.fields.size() ? record.fields[*text_col] : std::string();
    out.push_back({"htl:" + std::to_string(record.line), text, *label});
  }
  return out;
}

std::vector<RawReview> balance_classes(std::vector<RawReview> reviews, std::uint64_t seed, IngestStats& stats) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < reviews.size(); ++i) by_class[reviews[i].label].push_back(i);
  const int majority = by_class[1].size() >= by_class[0].size() ? 1 : 0;
  const std::size_t target = by_class[1 - majority].size();
  auto& pool = by_class[majority];
  SeededRng rng = SeededRng(seed).derive("balance");
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  std::vector<bool> keep(reviews.size(), true);
  for (std::size_t i = target; i < pool.size(); ++i) keep[pool[i]] = false;
  stats.dropped_balance += pool.size() > target ? pool.size() - target : 0;
  std::vector<RawReview> out;
  out.reserve(2 * target);
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (keep[i]) out.push_back(std::move(reviews[i]));
  }
  return out;
}

LabeledCorpus assemble_corpus(std::string dataset, std::vector<RawReview> reviews, const IngestConfig& config,
                              IngestStats stats) {
  LabeledCorpus corpus;
  corpus.dataset = std::move(dataset);
  corpus.max_len = config.max_len;
  corpus.seed = config.seed;
  corpus.config_hash = sha256_hex(config.describe()).substr(0, 16);

  std::vector<text::Tokens> tokens;
  for (auto& review : reviews) {
    std::string normalized = text::normalize(review.text);
    if (normalized.empty()) {
      ++stats.dropped_empty;
      continue;
    }
    tokens.push_back(text::tokenize(normalized));
    (review.label == 1 ? stats.positive : stats.negative) += 1;
    corpus.documents.push_back({std::move(review.source_id), std::move(normalized), review.label, {}});
  }
  corpus.stats = std::move(stats);

  Partition partition = split(corpus.documents.size(), config.train_fraction, config.seed);
  std::sort(partition.train.begin(), partition.train.end());
  std::sort(partition.test.begin(), partition.test.end());
  corpus.train = std::move(partition.train);
  corpus.test = std::move(partition.test);

  std::vector<text::Tokens> train_tokens;
  train_tokens.reserve(corpus.train.size());
  for (std::size_t i : corpus.train) train_tokens.push_back(tokens[i]);
  corpus.vocabulary = text::build_vocabulary(train_tokens, config.vocab_size);
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    corpus.documents[i].sequence = text::encode_and_pad(tokens[i], corpus.vocabulary, config.max_len);
  }
  return corpus;
}

LabeledCorpus ingest_labr(const std::filesystem::path& path, const IngestConfig& config) {
  auto in = open_input(path);
  IngestStats stats;
  auto reviews = read_labr(in, config, stats);
  if (config.balance) reviews = balance_classes(std::move(reviews), config.seed, stats);
  LabeledCorpus corpus = assemble_corpus("labr", std::move(reviews), config, std::move(stats));
  corpus.source_hash = sha256_file(path);
  if (config.check_expected_counts && !config.balance) check_counts(corpus, kLabrExpected, corpus.stats);
  return corpus;
}

LabeledCorpus ingest_htl(const std::filesystem::path& path, const IngestConfig& config) {
  auto in = open_input(path);
  IngestStats stats;
  auto reviews = read_htl(in, config, stats);
  if (config.balance) reviews = balance_classes(std::move(reviews), config.seed, stats);
  LabeledCorpus corpus = assemble_corpus("htl", std::move(reviews), config, std::move(stats));
  corpus.source_hash = sha256_file(path);
  if (config.check_expected_counts && config.balance) check_counts(corpus, kHtlBalancedExpected, corpus.stats);
  return corpus;
}

std::string LabeledCorpus::vocabulary_hash() const { return sha256_hex(vocabulary.serialize()); }

std::vector<text::EncodedSequence> LabeledCorpus::sequences(std::span<const std::size_t> indices) const {
  std::vector<text::EncodedSequence> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(documents.at(i).sequence);
  return out;
}

std::vector<int> LabeledCorpus::labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(documents.at(i).label);
  return out;
}

void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  corpus.vocabulary.save(dir / "vocab.tsv");

  std::vector<char> in_train(corpus.documents.size(), 0);
  for (std::size_t i : corpus.train) in_train[i] = 1;
  std::ofstream out(dir / "corpus.tsv", std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / "corpus.tsv").string());
  out << "id\tlabel\tsplit\tindices\ttext\n";
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const Document& doc = corpus.documents[i];
    out << doc.source_id << '\t' << doc.label << '\t' << (in_train[i] ? "train" : "test") << '\t';
    for (std::size_t k = 0; k < doc.sequence.indices.size(); ++k) {
      if (k) out << ' ';
      out << doc.sequence.indices[k];
    }
    out << '\t' << doc.text << '\n';
  }

  json manifest = {
      {"dataset", corpus.dataset},
      {"max_len", corpus.max_len},
      {"seed", corpus.seed},
      {"vocab_size", corpus.vocabulary.max_size()},
      {"vocab_entries", corpus.vocabulary.size()},
      {"vocab_hash", corpus.vocabulary_hash()},
      {"config_hash", corpus.config_hash},
      {"source_hash", corpus.source_hash},
      {"records", corpus.stats.records},
      {"counts",
       {{"kept", corpus.documents.size()},
        {"positive", corpus.stats.positive},
        {"negative", corpus.stats.negative},
        {"train", corpus.train.size()},
        {"test", corpus.test.size()}}},
      {"dropped",
       {{"neutral", corpus.stats.dropped_neutral},
        {"empty", corpus.stats.dropped_empty},
        {"balance", corpus.stats.dropped_balance}}},
      {"warnings", corpus.stats.warnings},
  };
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';
}

LabeledCorpus load_corpus(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw DataError("no corpus manifest in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(mf);
  } catch (const json::exception& e) {
    throw DataError("corpus manifest is not valid JSON: " + std::string(e.what()));
  }
  LabeledCorpus corpus;
  try {
    corpus.dataset = manifest.at("dataset").get<std::string>();
    corpus.max_len = manifest.at("max_len").get<std::size_t>();
    corpus.seed = manifest.at("seed").get<std::uint64_t>();
    corpus.config_hash = manifest.at("config_hash").get<std::string>();
    corpus.source_hash = manifest.at("source_hash").get<std::string>();
    corpus.stats.records = manifest.at("records").get<std::size_t>();
    corpus.stats.dropped_neutral = manifest.at("dropped").at("neutral").get<std::size_t>();
    corpus.stats.dropped_empty = manifest.at("dropped").at("empty").get<std::size_t>();
    corpus.stats.dropped_balance = manifest.at("dropped").at("balance").get<std::size_t>();
    corpus.stats.warnings = manifest.at("warnings").get<std::vector<std::string>>();
    corpus.vocabulary = text::Vocabulary::load(dir / "vocab.tsv", manifest.at("vocab_size").get<std::size_t>());
    if (corpus.vocabulary_hash() != manifest.at("vocab_hash").get<std::string>()) {
      throw DataError("vocab.tsv does not match the hash recorded in the corpus manifest");
    }
  } catch (const json::exception& e) {
    throw DataError("corpus manifest is incomplete: " + std::string(e.what()));
  }

  std::ifstream in(dir / "corpus.tsv", std::ios::binary);
  if (!in) throw DataError("cannot read " + (dir / "corpus.tsv").string());
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) throw MalformedRecordError(line_no, "expected 5 tab-separated fields");
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    f.push_back(line.substr(start));
    Document doc;
    doc.source_id = f[0];
    if (f[1] != "0" && f[1] != "1") throw MalformedRecordError(line_no, "label must be 0 or 1");
    doc.label = f[1] == "1" ? 1 : 0;
    std::istringstream ids(f[3]);
    std::int32_t id = 0;
    while (ids >> id) {
      if (id < 0 || static_cast<std::size_t>(id) > corpus.vocabulary.max_size() + 1) {
        throw MalformedRecordError(line_no, "token index out of vocabulary range");
      }
      doc.sequence.indices.push_back(id);
    }
    if (doc.sequence.indices.size() != corpus.max_len) {
      throw MalformedRecordError(line_no, "sequence length differs from max_len");
    }
    doc.text = f[4];
    doc.sequence.original_token_count = text::tokenize(doc.text).size();
    (doc.label == 1 ? corpus.stats.positive : corpus.stats.negative) += 1;
    const std::size_t index = corpus.documents.size();
    if (f[2] == "train") {
      corpus.train.push_back(index);
    } else if (f[2] == "test") {
      corpus.test.push_back(index);
    } else {
      throw MalformedRecordError(line_no, "split must be train or test");
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace asa
