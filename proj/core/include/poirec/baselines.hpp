#pragma once

#include <string>
#include <vector>

#include "poirec/corpus.hpp"
#include "poirec/index.hpp"
#include "poirec/term_distribution.hpp"
#include "poirec/tripctx.hpp"

namespace poirec {

/// Weighted tag query: weight(t) = psi(t) over the profile's tag union,
/// normalized. Under the constant psi this is uniform over T'.
TermDistribution tag_query(const UserProfile& rel_profile, const PsiScorer& psi);

/// Term selection from the profile's documents treated as one
/// pseudo-document: top k terms by BM25 term weight (idf * tf saturation),
/// each weighted by psi, normalized.
TermDistribution term_selection(const UserProfile& rel_profile, std::size_t k_terms,
                                const PsiScorer& psi, const InvertedIndex& index, double k1,
                                double b);

/// CombSUM fusion: per-list min-max normalization to [0,1], scores summed
/// per document (absent document contributes 0), ties broken by doc id.
/// A constant-score list contributes 1.0 for each of its documents.
RankedList combsum(const std::vector<RankedList>& lists);

/// Tags whose mean rating across all users reaches the threshold,
/// psi-weighted at query time.
TermDistribution most_popular_k(const std::vector<UserProfile>& profiles, double threshold,
                                const PsiScorer& psi);

/// Same selection restricted to one user's profile.
TermDistribution profile_popular_k(const UserProfile& profile, double threshold,
                                   const PsiScorer& psi);

/// Content + tag matching hybrid: BM25 content score of a profile-derived
/// term query, plus psi-weighted tag-overlap score, each min-max
/// normalized over the location's candidates and summed.
RankedList content_tag_match(const UserProfile& rel_profile, const PsiScorer& psi,
                             const InvertedIndex& index, const std::string& location,
                             std::size_t content_terms, double k1, double b);

}  // namespace poirec
