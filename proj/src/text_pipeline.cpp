#include "asa/text_pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "asa/errors.hpp"

namespace asa::text {
namespace {

enum class CharClass { kKeep, kDrop, kSeparator };

CharClass classify(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return CharClass::kKeep;
  // Arabic-Indic and extended Arabic-Indic digits.
  if ((cp >= 0x0660 && cp <= 0x0669) || (cp >= 0x06F0 && cp <= 0x06F9)) return CharClass::kKeep;
  // Letters of the Arabic block.
  if ((cp >= 0x0621 && cp <= 0x063A) || (cp >= 0x0641 && cp <= 0x064A) ||
      (cp >= 0x066E && cp <= 0x066F) || (cp >= 0x0671 && cp <= 0x06D3) || cp == 0x06D5 ||
      (cp >= 0x06EE && cp <= 0x06EF) || (cp >= 0x06FA && cp <= 0x06FC) || cp == 0x06FF) {
    return CharClass::kKeep;
  }
  // Harakat, superscript alef, Quranic marks, tatweel, ZWNJ/ZWJ.
  if ((cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || cp == 0x0640 ||
      (cp >= 0x06D6 && cp <= 0x06ED) || cp == 0x200C || cp == 0x200D) {
    return CharClass::kDrop;
  }
  return CharClass::kSeparator;
}

// Decodes one UTF-8 sequence starting at `pos`. Invalid bytes decode to
// U+FFFD and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos, std::size_t& length) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char lead = byte(pos);
  std::size_t need = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    length = 1;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    need = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    need = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    need = 3;
    cp = lead & 0x07;
  } else {
    length = 1;
    return 0xFFFD;
  }
  for (std::size_t i = 1; i <= need; ++i) {
    if (pos + i >= s.size() || (byte(pos + i) & 0xC0) != 0x80) {
      length = 1;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  length = need + 1;
  return cp;
}

}  // namespace

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t length = 1;
    const char32_t cp = decode_utf8(raw, pos, length);
    switch (classify(cp)) {
      case CharClass::kKeep:
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.append(raw.substr(pos, length));
        break;
      case CharClass::kDrop:
        break;
      case CharClass::kSeparator:
        pending_space = true;
        break;
    }
    pos += length;
  }
  return out;
}

Tokens tokenize(std::string_view normalized) {
  Tokens tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    const std::size_t end = std::min(normalized.find(' ', start), normalized.size());
    if (end > start) tokens.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

std::int32_t Vocabulary::index_of(std::string_view token) const {
  return find(token).value_or(kOovIndex);
}

std::optional<std::int32_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token_at(std::int32_t index) const {
  if (index < kFirstTokenIndex || static_cast<std::size_t>(index - kFirstTokenIndex) >= by_index_.size()) {
    throw UsageError("vocabulary index " + std::to_string(index) + " holds no token");
  }
  return by_index_[static_cast<std::size_t>(index - kFirstTokenIndex)];
}

std::int32_t Vocabulary::add(std::string token) {
  if (by_index_.size() >= max_size_) throw DataError("vocabulary is full");
  const auto index = static_cast<std::int32_t>(by_index_.size()) + kFirstTokenIndex;
  const auto [it, inserted] = index_.emplace(token, index);
  if (!inserted) throw DataError("duplicate vocabulary token '" + token + "'");
  by_index_.push_back(std::move(token));
  return index;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < by_index_.size(); ++i) {
    out += by_index_[i];
    out += '\t';
    out += std::to_string(i + kFirstTokenIndex);
    out += '\n';
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file " + path.string());
  out << serialize();
}

Vocabulary Vocabulary::parse(std::string_view content, std::optional<std::size_t> max_size) {
  std::vector<std::pair<std::int32_t, std::string>> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw MalformedRecordError(line_no, "expected <token>\\t<index>");
    }
    std::int32_t index = 0;
    try {
      std::size_t consumed = 0;
      const std::string number(line.substr(tab + 1));
      index = std::stoi(number, &consumed);
      if (consumed != number.size()) throw std::invalid_argument(number);
    } catch (const std::exception&) {
      throw MalformedRecordError(line_no, "index is not an integer");
    }
    if (index < kFirstTokenIndex) throw MalformedRecordError(line_no, "index below 2 is reserved");
    entries.emplace_back(index, std::string(line.substr(0, tab)));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) {
      throw DataError("duplicate vocabulary index " + std::to_string(entries[i].first));
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<std::int32_t>(i) + kFirstTokenIndex) {
      throw DataError("vocabulary indices are not contiguous from 2");
    }
  }
  const std::size_t capacity = max_size.value_or(entries.size());
  if (entries.size() > capacity) throw DataError("vocabulary exceeds its maximum size");
  Vocabulary vocab(capacity);
  for (auto& [index, token] : entries) vocab.add(std::move(token));
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::optional<std::size_t> max_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read vocabulary file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), max_size);
}

Vocabulary build_vocabulary(const std::vector<Tokens>& corpus, std::size_t max_size) {
  if (max_size < 1) throw UsageError("vocabulary max_size must be at least 1");
  struct Stat {
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string_view, Stat> stats;
  std::vector<std::string_view> order;
  for (const auto& doc : corpus) {
    for (const auto& token : doc) {
      auto [it, inserted] = stats.try_emplace(token, Stat{0, order.size()});
      if (inserted) order.push_back(token);
      ++it->second.count;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::string_view a, std::string_view b) {
    return stats[a].count > stats[b].count;
  });
  Vocabulary vocab(max_size);
  const std::size_t keep = std::min(max_size, order.size());
  for (std::size_t i = 0; i < keep; ++i) vocab.add(std::string(order[i]));
  return vocab;
}

EncodedSequence encode_and_pad(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 1) throw UsageError("max_len must be at least 1");
  EncodedSequence seq;
  seq.original_token_count = tokens.size();
  seq.indices.assign(max_len, kPadIndex);
  const std::size_t kept = std::min(tokens.size(), max_len);
  const std::size_t skip = tokens.size() - kept;
  const std::size_t offset = max_len - kept;
  for (std::size_t i = 0; i < kept; ++i) {
    seq.indices[offset + i] = vocab.index_of(tokens[skip + i]);
  }
  return seq;
}

EncodedSequence encode_text(std::string_view raw, const Vocabulary& vocab, std::size_t max_len) {
  return encode_and_pad(tokenize(normalize(raw)), vocab, max_len);
}

}  // namespace asa::text
