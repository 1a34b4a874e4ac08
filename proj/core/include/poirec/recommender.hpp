#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poirec/baselines.hpp"
#include "poirec/eval.hpp"
#include "poirec/rlm.hpp"

namespace poirec {

/// Every runnable retrieval method: the relevance-model family plus the
/// unsupervised baselines.
enum class Model {
  bm25,            // weighted tag query, BM25 scoring
  term_select,     // BM25 term selection from the profile text
  bm25_termsel,    // CombSUM of the two above
  rlm,             // feedback relevance model over location candidates
  kderlm,          // kernel-density relevance model
  most_popular,    // globally popular tags
  profile_popular, // per-profile popular tags
  content_tag,     // content + tag matching hybrid
  hybrid,          // CombSUM of kderlm and content_tag
  frlm,            // factored relevance model
  kdefrlm,         // kernel-density factored relevance model
};

std::string to_string(Model m);
Model model_from_string(std::string_view s);
std::vector<Model> all_models();

/// Published per-model optima; gamma_h for kdefrlm depends on the psi mode.
FeedbackConfig model_defaults(Model m, PsiMode psi, FeedbackConfig base = {});

/// Ties the index, embeddings, knowledge base and profile collection
/// together and runs any model for any user. Immutable once constructed;
/// distinct users may run in parallel.
class Recommender {
 public:
  Recommender(const InvertedIndex* index, const EmbeddingStore* store, const ContextKB* kb,
              const std::vector<UserProfile>* profiles, FeedbackConfig cfg);

  RankedList run_user(const UserProfile& profile, Model model) const;
  const UserProfile& profile_by_id(const std::string& user_id) const;

  /// Ranked lists for every profile (or one user), keyed by user id.
  Run run_all(Model model, const std::optional<std::string>& user_id = std::nullopt) const;

  const FeedbackConfig& config() const { return cfg_; }

 private:
  const InvertedIndex* index_;
  const EmbeddingStore* store_;
  const ContextKB* kb_;
  const std::vector<UserProfile>* profiles_;
  FeedbackConfig cfg_;
};

/// FNV-1a hash of a canonical config rendering; embedded in run tags so a
/// run file pins the configuration that produced it.
std::string config_digest(const FeedbackConfig& cfg, Model model);
std::string run_tag(const FeedbackConfig& cfg, Model model);

}  // namespace poirec
