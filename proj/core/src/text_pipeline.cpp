#include "poirec/text_pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "poirec/errors.hpp"

namespace poirec {

std::string to_string(Stemmer s) {
  return s == Stemmer::porter ? "porter" : "none";
}

Stemmer stemmer_from_string(std::string_view s) {
  if (s == "porter") return Stemmer::porter;
  if (s == "none") return Stemmer::none;
  throw DataError("unknown stemmer: " + std::string(s));
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",  "are",   "as",    "at",    "be",   "but",
      "by",   "for",  "if",   "in",    "into",  "is",    "it",   "no",
      "not",  "of",   "on",   "or",    "such",  "that",  "the",  "their",
      "then", "there", "these", "they", "this",  "to",    "was",  "will",
      "with"};
  return words;
}

PipelineConfig PipelineConfig::plain() {
  PipelineConfig cfg;
  cfg.stopword_list.reset();
  cfg.stemmer = Stemmer::none;
  return cfg;
}

namespace {

// Word characters: ASCII alphanumerics plus any byte >= 0x80, so that
// UTF-8 sequences survive intact inside a token.
bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

std::string apply_word(std::string word, const PipelineConfig& cfg) {
  if (cfg.lowercase) {
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
  }
  if (cfg.stopword_list && cfg.stopword_list->count(word)) return {};
  if (cfg.stemmer == Stemmer::porter) word = porter_stem(std::move(word));
  return word;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& cfg) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::string w = apply_word(std::move(cur), cfg);
    cur.clear();
    if (!w.empty()) out.push_back(std::move(w));
  };
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string canonical_phrase(std::string_view phrase, const PipelineConfig& cfg) {
  std::vector<std::string> toks = tokenize(phrase, cfg);
  std::string key;
  for (const auto& t : toks) {
    if (!key.empty()) key.push_back('-');
    key += t;
  }
  return key;
}

std::vector<std::string> tag_tokens(std::string_view tag, const PipelineConfig& cfg) {
  std::vector<std::string> toks = tokenize(tag, cfg);
  if (toks.size() <= 1) return toks;
  std::string joined;
  for (const auto& t : toks) {
    if (!joined.empty()) joined.push_back('-');
    joined += t;
  }
  std::vector<std::string> out;
  out.reserve(toks.size() + 1);
  out.push_back(std::move(joined));
  for (auto& t : toks) out.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// Porter stemmer. Straight transcription of the original rule list; the
// word is held in a buffer and `end` marks the current stem length.

namespace {

class PorterState {
 public:
  explicit PorterState(std::string w) : b_(std::move(w)), end_(b_.size()) {}

  std::string result() {
    b_.resize(end_);
    return std::move(b_);
  }

  bool is_consonant(size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Measure of the stem b[0..k): number of VC sequences.
  size_t measure(size_t k) const {
    size_t n = 0, i = 0;
    while (i < k && is_consonant(i)) ++i;
    while (i < k) {
      while (i < k && !is_consonant(i)) ++i;
      if (i >= k) break;
      ++n;
      while (i < k && is_consonant(i)) ++i;
    }
    return n;
  }

  bool has_vowel(size_t k) const {
    for (size_t i = 0; i < k; ++i)
      if (!is_consonant(i)) return true;
    return false;
  }

  bool double_consonant(size_t k) const {
    return k >= 2 && b_[k - 1] == b_[k - 2] && is_consonant(k - 1);
  }

  // cvc at the end of b[0..k), where the last c is not w, x or y.
  bool cvc(size_t k) const {
    if (k < 3) return false;
    if (!is_consonant(k - 3) || is_consonant(k - 2) || !is_consonant(k - 1)) return false;
    char c = b_[k - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const {
    if (suffix.size() > end_) return false;
    return std::string_view(b_).substr(end_ - suffix.size(), suffix.size()) == suffix;
  }

  size_t stem_len(std::string_view suffix) const { return end_ - suffix.size(); }

  void set_suffix(std::string_view suffix, std::string_view repl) {
    size_t k = stem_len(suffix);
    b_.resize(k);
    b_ += repl;
    end_ = b_.size();
  }

  void truncate(size_t k) {
    end_ = k;
    b_.resize(end_);
  }

  size_t size() const { return end_; }
  char last() const { return b_[end_ - 1]; }

  // Rule helper used by steps 2-4: replace suffix if measure(stem) > m_min.
  bool rule(std::string_view suffix, std::string_view repl, size_t m_min) {
    if (!ends(suffix)) return false;
    if (measure(stem_len(suffix)) > m_min) set_suffix(suffix, repl);
    return true;  // suffix matched; stop scanning this step either way
  }

 private:
  std::string b_;
  size_t end_;
};

}  // namespace

std::string porter_stem(std::string word) {
  if (word.size() <= 2) return word;
  for (char c : word)
    if (c < 'a' || c > 'z') return word;

  PorterState s(std::move(word));

  // Step 1a
  if (s.ends("sses")) {
    s.set_suffix("sses", "ss");
  } else if (s.ends("ies")) {
    s.set_suffix("ies", "i");
  } else if (!s.ends("ss") && s.ends("s")) {
    s.set_suffix("s", "");
  }

  // Step 1b
  bool cleanup = false;
  if (s.ends("eed")) {
    if (s.measure(s.stem_len("eed")) > 0) s.set_suffix("eed", "ee");
  } else if (s.ends("ed") && s.has_vowel(s.stem_len("ed"))) {
    s.set_suffix("ed", "");
    cleanup = true;
  } else if (s.ends("ing") && s.has_vowel(s.stem_len("ing"))) {
    s.set_suffix("ing", "");
    cleanup = true;
  }
  if (cleanup) {
    if (s.ends("at") || s.ends("bl") || s.ends("iz")) {
      s.set_suffix("", "e");
    } else if (s.double_consonant(s.size())) {
      char c = s.last();
      if (c != 'l' && c != 's' && c != 'z') s.truncate(s.size() - 1);
    } else if (s.measure(s.size()) == 1 && s.cvc(s.size())) {
      s.set_suffix("", "e");
    }
  }

  // Step 1c
  if (s.ends("y") && s.has_vowel(s.stem_len("y"))) s.set_suffix("y", "i");

  // Step 2
  static constexpr std::pair<std::string_view, std::string_view> step2[] = {
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}};
  for (const auto& [suf, repl] : step2)
    if (s.rule(suf, repl, 0)) break;

  // Step 3
  static constexpr std::pair<std::string_view, std::string_view> step3[] = {
      {"icate", "ic"}, {"ative", ""},  {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},    {"ness", ""}};
  for (const auto& [suf, repl] : step3)
    if (s.rule(suf, repl, 0)) break;

  // Step 4
  static constexpr std::string_view step4[] = {
      "al",  "ance", "ence", "er",   "ic",  "able", "ible", "ant", "ement",
      "ment", "ent", "ion",  "ou",   "ism", "ate",  "iti",  "ous", "ive", "ize"};
  for (std::string_view suf : step4) {
    if (!s.ends(suf)) continue;
    size_t k = s.stem_len(suf);
    if (suf == "ion") {
      if (k >= 1 && (s.ends("sion") || s.ends("tion")) && s.measure(k) > 1)
        s.set_suffix(suf, "");
    } else if (s.measure(k) > 1) {
      s.set_suffix(suf, "");
    }
    break;
  }

  // Step 5a
  if (s.ends("e")) {
    size_t k = s.stem_len("e");
    size_t m = s.measure(k);
    if (m > 1 || (m == 1 && !s.cvc(k))) s.set_suffix("e", "");
  }
  // Step 5b
  if (s.size() >= 2 && s.last() == 'l' && s.double_consonant(s.size()) &&
      s.measure(s.size()) > 1) {
    s.truncate(s.size() - 1);
  }

  return s.result();
}

}  // namespace poirec
