#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "poirec/corpus.hpp"
#include "poirec/term_distribution.hpp"

namespace poirec {

/// Retrieval output: scores nonincreasing, doc ids distinct, ties broken
/// by doc id ascending.
struct RankedEntry {
  std::string doc_id;
  double score = 0.0;
};

struct RankedList {
  std::vector<RankedEntry> entries;
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// Immutable inverted + forward index over a POI collection. Docs are
/// ordinal-addressed in doc-id order, terms in lexicographic order, so
/// every traversal is deterministic. Safe to share across threads once
/// built.
class InvertedIndex {
 public:
  struct Posting {
    uint32_t doc = 0;
    uint32_t tf = 0;
  };

  static InvertedIndex build(const std::vector<PoiDocument>& docs,
                             const PipelineConfig& pipeline);

  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  std::size_t num_docs() const { return docs_.size(); }
  std::size_t num_terms() const { return terms_.size(); }
  int64_t collection_len() const { return collection_len_; }
  double avg_doc_len() const {
    return static_cast<double>(collection_len_) / static_cast<double>(docs_.size());
  }

  std::optional<uint32_t> doc_ord(const std::string& doc_id) const;
  const std::string& doc_id(uint32_t ord) const { return docs_[ord].id; }
  const std::string& city_of(uint32_t ord) const { return docs_[ord].city; }
  int64_t doc_len(uint32_t ord) const { return docs_[ord].len; }
  const std::vector<std::string>& tags_of(uint32_t ord) const { return docs_[ord].tags; }

  std::optional<uint32_t> term_id(const std::string& term) const;
  const std::string& term(uint32_t tid) const { return terms_[tid]; }
  int64_t coll_tf(uint32_t tid) const { return coll_tf_[tid]; }
  int64_t coll_tf(const std::string& term) const;
  std::size_t doc_freq(uint32_t tid) const { return postings_[tid].size(); }

  const std::vector<Posting>& postings(uint32_t tid) const { return postings_[tid]; }
  /// (term_id, tf) pairs of one document, term_id ascending.
  const std::vector<std::pair<uint32_t, uint32_t>>& doc_terms(uint32_t ord) const {
    return forward_[ord];
  }

  uint32_t tf(uint32_t tid, uint32_t ord) const;
  int64_t tf(const std::string& term, const std::string& doc_id) const;

  /// Candidate ordinals for a location filter (all docs when nullopt);
  /// ascending, i.e. doc-id order.
  std::vector<uint32_t> candidates(const std::optional<std::string>& city) const;

  const PipelineConfig& pipeline() const { return pipeline_; }

 private:
  struct DocInfo {
    std::string id;
    std::string city;
    int64_t len = 0;
    std::vector<std::string> tags;
  };

  void finalize();  // rebuilds postings/coll_tf/doc map from forward lists

  std::vector<DocInfo> docs_;                      // doc-id order
  std::vector<std::string> terms_;                 // lexicographic
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> forward_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<int64_t> coll_tf_;
  int64_t collection_len_ = 0;
  std::unordered_map<std::string, uint32_t> doc_ord_;
  std::unordered_map<std::string, uint32_t> term_id_;
  std::map<std::string, std::vector<uint32_t>> city_docs_;
  PipelineConfig pipeline_;
};

/// Dirichlet-smoothed document language model:
///   (tf(w,d) + mu * cf(w)/|C|) / (|d| + mu)
/// mu = 0 gives the maximum-likelihood estimate. Unknown doc -> DataError;
/// unknown term is simply probability 0 under MLE.
double lm_prob(const InvertedIndex& index, const std::string& term, const std::string& doc_id,
               double mu);
double lm_prob_ord(const InvertedIndex& index, uint32_t tid, uint32_t ord, double mu);

/// BM25 with per-term query weights multiplied into each term's
/// contribution. idf = ln(1 + (N - df + 0.5)/(df + 0.5)).
RankedList bm25_retrieve(const TermDistribution& query, const InvertedIndex& index,
                         const std::optional<std::string>& location, double k1, double b,
                         std::size_t top_k);

/// Query-likelihood (cross entropy) scoring: sum_w theta(w) * log P(w|d)
/// under Dirichlet smoothing. Terms with zero smoothed mass are skipped.
/// theta must be normalized.
RankedList kl_retrieve(const TermDistribution& theta, const InvertedIndex& index,
                       const std::optional<std::string>& location, double mu,
                       std::size_t top_k);

}  // namespace poirec
