#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "poirec/corpus.hpp"
#include "poirec/embeddings.hpp"
#include "poirec/text_pipeline.hpp"

namespace poirec {

struct SingleContextEntry {
  std::string term;      // canonical key
  std::string category;  // "trip-type" | "trip-duration" | "accompanied-by"
  std::string value;
  double score_raw = 0.0;   // assessor score in [-1,1]
  double score_norm = 0.0;  // (raw+1)/2 in [0,1]
  int assessors = 0;
};

struct JointContextEntry {
  std::string term;  // canonical key
  TripContext context;
  int label = 0;  // +1 / -1
  int assessors = 0;
};

/// Crowd-assessed contextual appropriateness knowledge base. Terms are
/// pipeline-processed at load so lookups share the corpus vocabulary.
class ContextKB {
 public:
  /// single KB TSV: assessors, raw_score, term, category ("trip-duration=weekend-trip")
  /// joint KB TSV:  assessors, label, term, trip_type, trip_duration, accompanied_by
  static ContextKB load(const std::string& path_single, const std::string& path_joint,
                        const PipelineConfig& pipeline);
  static ContextKB empty(const PipelineConfig& pipeline);

  /// Normalized appropriateness of a term for one category=value pair;
  /// 0 when the pair is unknown. The term may be a raw phrase.
  double kappa_s(std::string_view term, std::string_view category,
                 std::string_view value) const;

  /// 1 iff the term is labeled appropriate for the joint context, else 0.
  int kappa_j(std::string_view term, const TripContext& ctx) const;

  /// Terms with kappa_s > 0 for the pair, sorted.
  const std::vector<std::string>& seeds_single(std::string_view category,
                                               std::string_view value) const;
  /// Terms with kappa_j == 1 for the context, sorted.
  const std::vector<std::string>& seeds_joint(const TripContext& ctx) const;

  bool empty_kb() const { return single_.empty() && joint_.empty(); }
  std::size_t single_size() const { return single_.size(); }
  std::size_t joint_size() const { return joint_.size(); }
  const PipelineConfig& pipeline() const { return pipeline_; }

 private:
  std::string canon(std::string_view phrase) const;

  PipelineConfig pipeline_;
  std::map<std::string, double> single_;                    // "term\x1fcat=val" -> norm score
  std::map<std::string, int> joint_;                        // "term\x1fctxkey" -> label
  std::map<std::string, std::vector<std::string>> seeds_s_; // "cat=val" -> seed terms
  std::map<std::string, std::vector<std::string>> seeds_j_; // ctxkey -> seed terms
};

enum class PsiMode { location, single, joint };

std::string to_string(PsiMode m);
PsiMode psi_mode_from_string(std::string_view s);

/// Contextual appropriateness in [0,1] for one term under the current
/// trip qualifiers.
///   location: constant 1 (hard-constraint-only retrieval)
///   single:   embedding max-similarity to single-category seeds; with a
///             full 3-field context the three category scores are averaged
///   joint:    max-similarity to the joint-context seed set
/// An empty seed set, or out-of-vocabulary evidence, yields neutral 1.
class PsiScorer {
 public:
  PsiScorer(PsiMode mode, std::optional<TripContext> context, const ContextKB* kb,
            const EmbeddingStore* store);

  double operator()(std::string_view term) const;
  PsiMode mode() const { return mode_; }

 private:
  double compute(const std::string& term) const;

  struct Cache {
    std::mutex mu;
    std::unordered_map<std::string, double> values;
  };

  PsiMode mode_;
  std::optional<TripContext> context_;
  const ContextKB* kb_ = nullptr;
  const EmbeddingStore* store_ = nullptr;
  std::vector<const std::vector<std::string>*> seed_sets_;  // one per category (s) or one (j)
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

/// Single-category psi_s: max similarity of term to the seeds of one
/// category=value pair (neutral 1 on empty seeds / OOV).
double psi_single_category(std::string_view term, std::string_view category,
                           std::string_view value, const ContextKB& kb,
                           const EmbeddingStore& store);

}  // namespace poirec
