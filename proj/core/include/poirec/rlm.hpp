#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poirec/corpus.hpp"
#include "poirec/embeddings.hpp"
#include "poirec/index.hpp"
#include "poirec/term_distribution.hpp"
#include "poirec/tripctx.hpp"

namespace poirec {

/// Shared knobs for the relevance-model family. Defaults are the FRLM
/// optimum; model_defaults() switches them per model.
struct FeedbackConfig {
  std::size_t fb_docs = 5;   // M, feedback documents
  std::size_t fb_terms = 25; // tau, expansion terms kept per distribution
  double gamma_h = 0.8;      // exploitation/exploration trade-off
  double lambda = 0.6;       // mixture weight against the tag/query model
  KernelConfig kernel;       // KDE bandwidth
  PsiMode psi_mode = PsiMode::location;

  double mu = 1000.0;             // Dirichlet smoothing for retrieval scoring
  double k1 = 1.2, b = 0.75;      // BM25 (initial retrieval and baselines)
  double floor_eps = 1e-9;        // zero-probability floor in factored products
  double relevance_threshold = 0.8;
  std::size_t top_poi = 50;       // final ranked-list depth
};

/// Classic relevance model over feedback documents, maximum-likelihood
/// probabilities throughout:
///   weight(w) = sum_D P(w|D) * psi(w) * prod_q P(q|D)
/// Candidate terms are the union of feedback-document vocabularies.
/// Throws DegenerateEstimate when no query term occurs in any document.
TermDistribution estimate_rm1(const std::vector<std::string>& query_terms,
                              const std::vector<std::string>& top_docs,
                              const InvertedIndex& index, const PsiScorer* psi = nullptr);

/// Convex mixture with the original query model:
///   lambda * feedback + (1 - lambda) * query_mle
/// Endpoints return the corresponding component exactly.
TermDistribution mix_rm3(const TermDistribution& feedback, const TermDistribution& query_mle,
                         double lambda);

/// Rating-weighted relevance model over a user's relevant history, the
/// tag union acting as the query:
///   weight(w) = sum_{(D,T,r)} r * P(w|D) * psi(w) * prod_{t in T'} P(t|D)
/// The profile must already be the relevant subset.
TermDistribution profile_rlm(const UserProfile& rel_profile, const PsiScorer& psi,
                             const InvertedIndex& index);

/// Exploration re-estimation from the top-M location-constrained documents
/// retrieved with profile_dist as the query:
///   weight(w) = sum_d P(w|d) * psi(w) * prod_{t in theta} P(t|d)^theta(t)
/// The weighted product is geometric; zero probabilities contribute the
/// configured floor instead of annihilating the document.
TermDistribution factored_rlm(const TermDistribution& profile_dist, const std::string& location,
                              const PsiScorer& psi, const InvertedIndex& index,
                              const FeedbackConfig& cfg);

/// gamma_h * exploit + (1 - gamma_h) * explore, renormalized; endpoints
/// return the corresponding component exactly.
TermDistribution combine_frlm(const TermDistribution& exploit, const TermDistribution& explore,
                              double gamma_h);

/// Kernel-density generalization of the profile model. With M the
/// concatenation of the profile's documents:
///   weight(w) = sum_{t in T'} [sum_{(D,T,r)} r P(w|D)] * psi(w) * P(t|M) * K(w,t)
/// K is the Gaussian kernel over embedded vectors; out-of-vocabulary
/// (w,t) pairs are skipped.
TermDistribution kde_profile_rlm(const UserProfile& rel_profile, const PsiScorer& psi,
                                 const EmbeddingStore& store, const InvertedIndex& index,
                                 const FeedbackConfig& cfg);

/// Kernel-density relevance model over retrieved feedback documents
/// (concatenated into one model M), pivot terms being the query tags:
///   weight(w) = P(w|M) * psi(w) * sum_t P(t|M) * K(w,t)
TermDistribution estimate_kde_rlm(const std::vector<std::string>& tags,
                                  const std::vector<std::string>& top_docs,
                                  const PsiScorer& psi, const EmbeddingStore& store,
                                  const InvertedIndex& index, const KernelConfig& kernel);

/// Kernel-density generalization of the exploration model; the kernel is
/// evaluated against the expansion terms and aggregated by sum:
///   weight(w) = sum_d P(w|d) * prod_{t in theta} P(t|d)^theta(t)
///               * psi(w) * sum_{t in theta} K(w,t)
TermDistribution kde_factored_rlm(const TermDistribution& profile_dist,
                                  const std::string& location, const PsiScorer& psi,
                                  const EmbeddingStore& store, const InvertedIndex& index,
                                  const FeedbackConfig& cfg);

/// The five retrieval models built from this module's estimators.
enum class ModelKind { bm25, rlm, kderlm, frlm, kdefrlm };

/// End-to-end recommendation: estimate the model's final distribution
/// (truncated to tau, normalized), then location-constrained retrieval of
/// the top cfg.top_poi POIs.
RankedList recommend(const UserProfile& profile, ModelKind kind, const FeedbackConfig& cfg,
                     const InvertedIndex& index, const EmbeddingStore* store,
                     const ContextKB* kb);

/// The model's final expansion distribution, before retrieval. Exposed for
/// inspection and tests.
TermDistribution final_distribution(const UserProfile& profile, ModelKind kind,
                                    const FeedbackConfig& cfg, const InvertedIndex& index,
                                    const EmbeddingStore* store, const ContextKB* kb);

}  // namespace poirec
