#include "asa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "asa/errors.hpp"
#include "asa/rng.hpp"

namespace asa::synthetic {
namespace {

constexpr std::size_t kMarkersPerClass = 60;

const std::vector<std::string> kPositiveSeeds = {
    "جيد", "رائع", "ممتاز", "مساعدون", "هادئ", "جميل", "نظيف", "مريح", "لطيف", "انصح", "معجب", "رائعه",
};
const std::vector<std::string> kNegativeSeeds = {
    "سيء", "غير", "ولكن", "قذر", "مزعج", "سيئه", "ضعيف", "متسخ", "بطيء", "لاانصح", "مخيب", "رديء",
};
const std::vector<std::string> kNeutralSeeds = {
    "الفندق", "الغرفه", "العاملون", "الخدمه", "المرافق", "الموقع", "الافطار", "في", "من", "الي", "كان", "جدا",
    "هذا", "مع", "على", "الاستقبال", "المسبح", "الليله", "السعر", "المطعم",
};

// Arabic letters U+0628..U+064A minus the non-letter gap U+063B..U+0640.
std::string random_word(SeededRng& rng) {
  static const std::vector<char32_t> letters = [] {
    std::vector<char32_t> v;
    for (char32_t c = 0x0628; c <= 0x063A; ++c) v.push_back(c);
    for (char32_t c = 0x0641; c <= 0x064A; ++c) v.push_back(c);
    return v;
  }();
  const std::size_t length = 3 + rng.below(5);
  std::string word;
  for (std::size_t i = 0; i < length; ++i) {
    const char32_t c = letters[rng.below(letters.size())];
    word += static_cast<char>(0xC0 | (c >> 6));
    word += static_cast<char>(0x80 | (c & 0x3F));
  }
  return word;
}

}  // namespace

Lexicon make_lexicon(const SyntheticConfig& config) {
  SeededRng rng = SeededRng(config.seed).derive("synth").derive("lexicon");
  std::set<std::string> used;
  auto take = [&](std::vector<std::string>& out, const std::vector<std::string>& seeds, std::size_t count) {
    for (const auto& s : seeds) {
      if (out.size() < count && used.insert(s).second) out.push_back(s);
    }
    while (out.size() < count) {
      std::string w = random_word(rng);
      if (used.insert(w).second) out.push_back(std::move(w));
    }
  };
  Lexicon lex;
  take(lex.positive, kPositiveSeeds, kMarkersPerClass);
  take(lex.negative, kNegativeSeeds, kMarkersPerClass);
  take(lex.neutral, kNeutralSeeds, std::max(config.neutral_words, kNeutralSeeds.size()));
  return lex;
}

std::vector<SyntheticReview> generate(const SyntheticConfig& config) {
  if (config.min_tokens < 1 || config.max_tokens < config.min_tokens) {
    throw UsageError("synthetic review length bounds are invalid");
  }
  const Lexicon lex = make_lexicon(config);

  // Zipf(1) cumulative weights over the neutral vocabulary.
  std::vector<double> cdf(lex.neutral.size());
  double total = 0.0;
  for (std::size_t r = 0; r < cdf.size(); ++r) cdf[r] = total += 1.0 / static_cast<double>(r + 1);
  for (double& c : cdf) c /= total;

  SeededRng rng = SeededRng(config.seed).derive("synth").derive("reviews");
  auto neutral_word = [&]() -> const std::string& {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), rng.uniform());
    return lex.neutral[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1)];
  };
  auto review = [&](int cls) {
    const std::size_t length = config.min_tokens + rng.below(config.max_tokens - config.min_tokens + 1);
    std::string text;
    for (std::size_t i = 0; i < length; ++i) {
      const std::string* word;
      if (cls >= 0 && rng.uniform() < config.marker_rate) {
        const bool agree = rng.uniform() < config.marker_agreement;
        const auto& markers = (cls == 1) == agree ? lex.positive : lex.negative;
        word = &markers[rng.below(markers.size())];
      } else if (cls < 0 && rng.uniform() < config.marker_rate) {
        const auto& markers = rng.uniform() < 0.5 ? lex.positive : lex.negative;
        word = &markers[rng.below(markers.size())];
      } else {
        word = &neutral_word();
      }
      if (!text.empty()) text += ' ';
      text += *word;
    }
    return text;
  };

  std::vector<int> classes;
  classes.insert(classes.end(), config.positives, 1);
  classes.insert(classes.end(), config.negatives, 0);
  classes.insert(classes.end(), config.neutrals, -1);
  SeededRng order = SeededRng(config.seed).derive("synth").derive("order");
  std::shuffle(classes.begin(), classes.end(), order.engine());

  // Flip the same number of labels in each direction so the class totals,
  // and hence the balanced corpus size, stay exact.
  const auto flips = static_cast<std::size_t>(
      std::llround(config.label_noise * static_cast<double>(std::min(config.positives, config.negatives))));
  std::vector<int> labels = classes;
  for (const int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), order.engine());
    for (std::size_t i = 0; i < flips && i < members.size(); ++i) labels[members[i]] = 1 - cls;
  }

  std::vector<SyntheticReview> out;
  out.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const int label = labels[i];
    out.push_back({label < 0 ? "neutral" : (label == 1 ? "positive" : "negative"), review(classes[i])});
  }
  return out;
}

void write_htl_tsv(std::ostream& out, const std::vector<SyntheticReview>& reviews) {
  out << "polarity\ttext\n";
  for (const auto& r : reviews) out << r.polarity << '\t' << r.text << '\n';
}

void write_htl_tsv(const std::filesystem::path& path, const SyntheticConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_htl_tsv(out, generate(config));
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace asa::synthetic
