#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace poirec {

enum class Stemmer { none, porter };

std::string to_string(Stemmer s);
Stemmer stemmer_from_string(std::string_view s);

/// Default English stopword set (a small standard list).
const std::set<std::string>& default_stopwords();

/// Deterministic text processing configuration. Two equal configs always
/// produce byte-identical token streams for the same input.
struct PipelineConfig {
  bool lowercase = true;
  /// Words removed after lowercasing. nullopt disables removal entirely.
  std::optional<std::set<std::string>> stopword_list = default_stopwords();
  Stemmer stemmer = Stemmer::porter;

  bool operator==(const PipelineConfig&) const = default;

  /// Config with no stopword removal and no stemming (lowercase only).
  static PipelineConfig plain();
};

/// Splits on non-alphanumeric bytes (UTF-8 continuation bytes are kept
/// inside tokens), then applies lowercase/stopwords/stemmer per config.
std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& cfg);

/// Canonical single-token key for a (possibly multi-word) phrase: pipeline
/// tokens joined with '-'. "American Restaurant" and "american-restaurant"
/// map to the same key. Empty result means the phrase dissolved entirely
/// (e.g. all stopwords).
std::string canonical_phrase(std::string_view phrase, const PipelineConfig& cfg);

/// Index-side representation of one tag: the joined unit first (when the
/// phrase has more than one token), followed by the constituent tokens.
std::vector<std::string> tag_tokens(std::string_view tag, const PipelineConfig& cfg);

/// Porter's stemming algorithm (original 1980 rule set). Expects a
/// lowercase ASCII word; other inputs are returned unchanged.
std::string porter_stem(std::string word);

}  // namespace poirec
