#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace asa::text {

using Tokens = std::vector<std::string>;

inline constexpr std::int32_t kPadIndex = 0;
inline constexpr std::int32_t kOovIndex = 1;
inline constexpr std::int32_t kFirstTokenIndex = 2;

/// Replaces every character that is not an Arabic letter or a digit
/// (ASCII, Arabic-Indic, extended Arabic-Indic) with a space, collapses
/// whitespace runs and trims. Arabic diacritics, tatweel and zero-width
/// joiners are deleted instead so that vocalized words stay whole.
std::string normalize(std::string_view raw);

/// Splits normalized text on spaces; never yields empty tokens.
Tokens tokenize(std::string_view normalized);

/// Frequency-ranked token index. Index 0 is padding, 1 is out-of-vocabulary,
/// tokens occupy the contiguous range [2, size()+1].
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::size_t max_size) : max_size_(max_size) {}

  std::size_t max_size() const noexcept { return max_size_; }
  std::size_t size() const noexcept { return by_index_.size(); }
  bool empty() const noexcept { return by_index_.empty(); }

  /// Index for `token`, or kOovIndex when absent.
  std::int32_t index_of(std::string_view token) const;
  std::optional<std::int32_t> find(std::string_view token) const;
  /// Token stored at `index` (must be in [2, size()+1]).
  const std::string& token_at(std::int32_t index) const;

  /// Tokens ordered by index, starting at index 2.
  const std::vector<std::string>& tokens() const noexcept { return by_index_; }

  /// Appends `token` at the next free index. Throws DataError when the token
  /// is already present or the vocabulary is full.
  std::int32_t add(std::string token);

  /// `<token>\t<index>\n` lines sorted by index.
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  /// Parses the line format written by serialize(). Rejects duplicate indices,
  /// duplicate tokens and non-contiguous ranges. When `max_size` is not given
  /// it is taken to be the number of entries.
  static Vocabulary parse(std::string_view content, std::optional<std::size_t> max_size = {});
  static Vocabulary load(const std::filesystem::path& path,
                         std::optional<std::size_t> max_size = {});

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.max_size_ == b.max_size_ && a.by_index_ == b.by_index_;
  }

 private:
  std::size_t max_size_ = 0;
  std::vector<std::string> by_index_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Keeps the `max_size` most frequent tokens; ties go to the token seen first.
Vocabulary build_vocabulary(const std::vector<Tokens>& corpus, std::size_t max_size);

struct EncodedSequence {
  std::vector<std::int32_t> indices;
  std::size_t original_token_count = 0;

  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

/// Maps tokens through `vocab` and fixes the length to `max_len`: long
/// sequences keep their last `max_len` tokens, short ones are pre-padded.
EncodedSequence encode_and_pad(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len);

/// normalize -> tokenize -> encode_and_pad.
EncodedSequence encode_text(std::string_view raw, const Vocabulary& vocab, std::size_t max_len);

}  // namespace asa::text
