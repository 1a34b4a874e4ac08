#include "poirec/rlm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "poirec/baselines.hpp"
#include "poirec/errors.hpp"

namespace poirec {

namespace {

// Documents resolved to ordinals, in the given order.
std::vector<uint32_t> resolve_docs(const std::vector<std::string>& doc_ids,
                                   const InvertedIndex& index) {
  std::vector<uint32_t> ords;
  ords.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    auto ord = index.doc_ord(id);
    if (!ord) throw DataError("unknown document '" + id + "'");
    ords.push_back(*ord);
  }
  return ords;
}

std::vector<uint32_t> profile_doc_ords(const UserProfile& profile, const InvertedIndex& index) {
  std::vector<std::string> ids;
  ids.reserve(profile.preferences.size());
  for (const auto& p : profile.preferences) ids.push_back(p.doc_id);
  return resolve_docs(ids, index);
}

// Union of document vocabularies, term ids ascending.
std::vector<uint32_t> term_union(const std::vector<uint32_t>& ords,
                                 const InvertedIndex& index) {
  std::set<uint32_t> tids;
  for (uint32_t ord : ords) {
    for (const auto& [tid, _] : index.doc_terms(ord)) tids.insert(tid);
  }
  return {tids.begin(), tids.end()};
}

double mle(const InvertedIndex& index, uint32_t tid, uint32_t ord) {
  return static_cast<double>(index.tf(tid, ord)) / static_cast<double>(index.doc_len(ord));
}

double mle(const InvertedIndex& index, const std::string& term, uint32_t ord) {
  auto tid = index.term_id(term);
  if (!tid) return 0.0;
  return mle(index, *tid, ord);
}

// Concatenated-document model: P(t|M) over the given docs.
class ConcatModel {
 public:
  ConcatModel(const std::vector<uint32_t>& ords, const InvertedIndex& index) {
    for (uint32_t ord : ords) {
      len_ += index.doc_len(ord);
      for (const auto& [tid, tf] : index.doc_terms(ord)) tf_[tid] += tf;
    }
  }
  double prob(uint32_t tid) const {
    auto it = tf_.find(tid);
    return it == tf_.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(len_);
  }
  double prob(const InvertedIndex& index, const std::string& term) const {
    auto tid = index.term_id(term);
    return tid ? prob(*tid) : 0.0;
  }

 private:
  std::unordered_map<uint32_t, int64_t> tf_;
  int64_t len_ = 0;
};

// Geometric product over the expansion distribution with a zero floor:
//   exp(sum_t theta(t) * log(max(P(t|d), eps)))
double weighted_tag_product(const std::vector<std::pair<std::string, double>>& theta,
                            const InvertedIndex& index, uint32_t ord, double eps) {
  double log_sum = 0.0;
  for (const auto& [term, weight] : theta) {
    double p = std::max(mle(index, term, ord), eps);
    log_sum += weight * std::log(p);
  }
  return std::exp(log_sum);
}

// Retrieval step feeding the exploration models.
std::vector<uint32_t> feedback_docs(const TermDistribution& profile_dist,
                                    const std::string& location, const InvertedIndex& index,
                                    const FeedbackConfig& cfg) {
  if (!profile_dist.is_normalized()) {
    throw DataError("profile distribution must be normalized before the factored step");
  }
  RankedList top = kl_retrieve(profile_dist, index, location, cfg.mu, cfg.fb_docs);
  if (top.empty()) throw DataError("no candidate documents in location '" + location + "'");
  std::vector<std::string> ids;
  ids.reserve(top.size());
  for (const auto& e : top.entries) ids.push_back(e.doc_id);
  return resolve_docs(ids, index);
}

}  // namespace

TermDistribution estimate_rm1(const std::vector<std::string>& query_terms,
                              const std::vector<std::string>& top_docs,
                              const InvertedIndex& index, const PsiScorer* psi) {
  if (query_terms.empty()) throw DataError("rm1 requires a nonempty query");
  if (top_docs.empty()) throw DataError("rm1 requires feedback documents");

  std::vector<uint32_t> ords = resolve_docs(top_docs, index);

  // Per-document query likelihoods; documents missing a query term drop out.
  std::vector<double> qlik(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i) {
    double prod = 1.0;
    for (const auto& q : query_terms) prod *= mle(index, q, ords[i]);
    qlik[i] = prod;
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    double weight = 0.0;
    for (std::size_t i = 0; i < ords.size(); ++i) {
      if (qlik[i] == 0.0) continue;
      weight += mle(index, tid, ords[i]) * qlik[i];
    }
    if (weight > 0.0 && psi) weight *= (*psi)(index.term(tid));
    if (weight > 0.0) dist.set(index.term(tid), weight);
  }
  if (dist.empty()) {
    throw DegenerateEstimate("rm1: no query term occurs in any feedback document");
  }
  return dist.normalize();
}

TermDistribution mix_rm3(const TermDistribution& feedback, const TermDistribution& query_mle,
                         double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw DataError("lambda must be in [0,1]");
  if (!feedback.is_normalized() || !query_mle.is_normalized()) {
    throw DataError("rm3 components must be normalized");
  }
  if (lambda == 1.0) return feedback;
  if (lambda == 0.0) return query_mle;
  TermDistribution out = TermDistribution::convex_mix(feedback, query_mle, lambda);
  return out.normalize();
}

TermDistribution profile_rlm(const UserProfile& rel_profile, const PsiScorer& psi,
                             const InvertedIndex& index) {
  std::vector<std::string> tags = tag_union(rel_profile);
  if (tags.empty()) throw DataError("profile has no tags");
  std::vector<uint32_t> ords = profile_doc_ords(rel_profile, index);

  std::vector<double> taglik(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i) {
    double prod = 1.0;
    for (const auto& t : tags) prod *= mle(index, t, ords[i]);
    taglik[i] = prod;
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    double weight = 0.0;
    for (std::size_t i = 0; i < ords.size(); ++i) {
      if (taglik[i] == 0.0) continue;
      weight += rel_profile.preferences[i].rating * mle(index, tid, ords[i]) * taglik[i];
    }
    if (weight > 0.0) weight *= psi(index.term(tid));
    if (weight > 0.0) dist.set(index.term(tid), weight);
  }
  if (dist.empty()) {
    throw DegenerateEstimate("profile rlm: tag co-occurrence evidence is all zero");
  }
  return dist.normalize();
}

TermDistribution factored_rlm(const TermDistribution& profile_dist, const std::string& location,
                              const PsiScorer& psi, const InvertedIndex& index,
                              const FeedbackConfig& cfg) {
  std::vector<uint32_t> ords = feedback_docs(profile_dist, location, index, cfg);
  auto theta = profile_dist.sorted_entries();

  std::vector<double> prod(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i) {
    prod[i] = weighted_tag_product(theta, index, ords[i], cfg.floor_eps);
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    double weight = 0.0;
    for (std::size_t i = 0; i < ords.size(); ++i) {
      weight += mle(index, tid, ords[i]) * prod[i];
    }
    if (weight > 0.0) weight *= psi(index.term(tid));
    if (weight > 0.0) dist.set(index.term(tid), weight);
  }
  if (dist.empty()) throw DegenerateEstimate("factored rlm: degenerate estimate");
  return dist.normalize();
}

TermDistribution combine_frlm(const TermDistribution& exploit, const TermDistribution& explore,
                              double gamma_h) {
  if (gamma_h < 0.0 || gamma_h > 1.0) throw DataError("gamma_h must be in [0,1]");
  if (gamma_h == 1.0) return exploit;
  if (gamma_h == 0.0) return explore;
  TermDistribution out = TermDistribution::convex_mix(exploit, explore, gamma_h);
  return out.normalize();
}

TermDistribution kde_profile_rlm(const UserProfile& rel_profile, const PsiScorer& psi,
                                 const EmbeddingStore& store, const InvertedIndex& index,
                                 const FeedbackConfig& cfg) {
  std::vector<std::string> tags = tag_union(rel_profile);
  if (tags.empty()) throw DataError("profile has no tags");
  std::vector<uint32_t> ords = profile_doc_ords(rel_profile, index);

  ConcatModel model(ords, index);
  std::vector<std::pair<std::string, double>> pivots;  // (tag, P(t|M)), OOV tags drop out
  for (const auto& t : tags) {
    if (!store.contains(t)) continue;
    pivots.emplace_back(t, model.prob(index, t));
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    const std::string& w = index.term(tid);
    if (!store.contains(w)) continue;
    double rated = 0.0;  // sum_{(D,T,r)} r * P(w|D)
    for (std::size_t i = 0; i < ords.size(); ++i) {
      rated += rel_profile.preferences[i].rating * mle(index, tid, ords[i]);
    }
    if (rated == 0.0) continue;
    double kernel_mass = 0.0;
    for (const auto& [t, pt] : pivots) {
      auto k = gaussian_kernel(store, w, t, cfg.kernel);
      if (k) kernel_mass += pt * *k;
    }
    double weight = rated * kernel_mass;
    if (weight > 0.0) weight *= psi(w);
    if (weight > 0.0) dist.set(w, weight);
  }
  if (dist.empty()) {
    throw DegenerateEstimate("kde profile rlm: no in-vocabulary evidence");
  }
  return dist.normalize();
}

TermDistribution estimate_kde_rlm(const std::vector<std::string>& tags,
                                  const std::vector<std::string>& top_docs,
                                  const PsiScorer& psi, const EmbeddingStore& store,
                                  const InvertedIndex& index, const KernelConfig& kernel) {
  if (tags.empty()) throw DataError("kde rlm requires pivot tags");
  if (top_docs.empty()) throw DataError("kde rlm requires feedback documents");
  std::vector<uint32_t> ords = resolve_docs(top_docs, index);

  ConcatModel model(ords, index);
  std::vector<std::pair<std::string, double>> pivots;
  for (const auto& t : tags) {
    if (!store.contains(t)) continue;
    pivots.emplace_back(t, model.prob(index, t));
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    const std::string& w = index.term(tid);
    if (!store.contains(w)) continue;
    double pw = model.prob(tid);
    if (pw == 0.0) continue;
    double kernel_mass = 0.0;
    for (const auto& [t, pt] : pivots) {
      auto k = gaussian_kernel(store, w, t, kernel);
      if (k) kernel_mass += pt * *k;
    }
    double weight = pw * kernel_mass;
    if (weight > 0.0) weight *= psi(w);
    if (weight > 0.0) dist.set(w, weight);
  }
  if (dist.empty()) throw DegenerateEstimate("kde rlm: no in-vocabulary evidence");
  return dist.normalize();
}

TermDistribution kde_factored_rlm(const TermDistribution& profile_dist,
                                  const std::string& location, const PsiScorer& psi,
                                  const EmbeddingStore& store, const InvertedIndex& index,
                                  const FeedbackConfig& cfg) {
  std::vector<uint32_t> ords = feedback_docs(profile_dist, location, index, cfg);
  auto theta = profile_dist.sorted_entries();

  std::vector<double> prod(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i) {
    prod[i] = weighted_tag_product(theta, index, ords[i], cfg.floor_eps);
  }

  TermDistribution dist;
  for (uint32_t tid : term_union(ords, index)) {
    const std::string& w = index.term(tid);
    if (!store.contains(w)) continue;
    // Kernel contributions are aggregated over the expansion terms and do
    // not depend on the document.
    double kernel_mass = 0.0;
    for (const auto& [t, _] : theta) {
      auto k = gaussian_kernel(store, w, t, cfg.kernel);
      if (k) kernel_mass += *k;
    }
    if (kernel_mass == 0.0) continue;
    double weight = 0.0;
    for (std::size_t i = 0; i < ords.size(); ++i) {
      weight += mle(index, tid, ords[i]) * prod[i];
    }
    weight *= kernel_mass;
    if (weight > 0.0) weight *= psi(w);
    if (weight > 0.0) dist.set(w, weight);
  }
  if (dist.empty()) throw DegenerateEstimate("kde factored rlm: degenerate estimate");
  return dist.normalize();
}

namespace {

struct Pipeline {
  UserProfile rel;
  PsiScorer psi;
  TermDistribution tagq;
};

Pipeline prepare(const UserProfile& profile, const FeedbackConfig& cfg,
                 const ContextKB* kb, const EmbeddingStore* store) {
  UserProfile rel = relevant_subset(profile, cfg.relevance_threshold);
  PsiScorer psi(cfg.psi_mode, profile.context, kb, store);
  TermDistribution tagq = tag_query(rel, psi);
  return {std::move(rel), std::move(psi), std::move(tagq)};
}

std::vector<std::string> ranked_ids(const RankedList& list) {
  std::vector<std::string> ids;
  ids.reserve(list.size());
  for (const auto& e : list.entries) ids.push_back(e.doc_id);
  return ids;
}

}  // namespace

TermDistribution final_distribution(const UserProfile& profile, ModelKind kind,
                                    const FeedbackConfig& cfg, const InvertedIndex& index,
                                    const EmbeddingStore* store, const ContextKB* kb) {
  Pipeline p = prepare(profile, cfg, kb, store);
  const std::string& city = profile.location;

  auto need_store = [&]() -> const EmbeddingStore& {
    if (!store) throw DataError("model requires word embeddings");
    return *store;
  };

  switch (kind) {
    case ModelKind::bm25:
      return p.tagq;

    case ModelKind::rlm: {
      RankedList initial = bm25_retrieve(p.tagq, index, city, cfg.k1, cfg.b, cfg.fb_docs);
      if (initial.empty()) throw DataError("no candidate documents in location '" + city + "'");
      TermDistribution rm1 =
          estimate_rm1(tag_union(p.rel), ranked_ids(initial), index, &p.psi);
      return mix_rm3(rm1, p.tagq, cfg.lambda).truncated(cfg.fb_terms);
    }

    case ModelKind::kderlm: {
      RankedList initial = bm25_retrieve(p.tagq, index, city, cfg.k1, cfg.b, cfg.fb_docs);
      if (initial.empty()) throw DataError("no candidate documents in location '" + city + "'");
      TermDistribution kde = estimate_kde_rlm(tag_union(p.rel), ranked_ids(initial), p.psi,
                                              need_store(), index, cfg.kernel);
      return mix_rm3(kde, p.tagq, cfg.lambda).truncated(cfg.fb_terms);
    }

    case ModelKind::frlm: {
      TermDistribution exploit = profile_rlm(p.rel, p.psi, index);
      TermDistribution exploit_m =
          mix_rm3(exploit, p.tagq, cfg.lambda).truncated(cfg.fb_terms);
      TermDistribution explore = factored_rlm(exploit_m, city, p.psi, index, cfg);
      TermDistribution explore_m =
          mix_rm3(explore, exploit_m, cfg.lambda).truncated(cfg.fb_terms);
      return combine_frlm(exploit_m, explore_m, cfg.gamma_h).truncated(cfg.fb_terms);
    }

    case ModelKind::kdefrlm: {
      TermDistribution exploit = kde_profile_rlm(p.rel, p.psi, need_store(), index, cfg);
      TermDistribution exploit_m =
          mix_rm3(exploit, p.tagq, cfg.lambda).truncated(cfg.fb_terms);
      TermDistribution explore =
          kde_factored_rlm(exploit_m, city, p.psi, need_store(), index, cfg);
      TermDistribution explore_m =
          mix_rm3(explore, exploit_m, cfg.lambda).truncated(cfg.fb_terms);
      return combine_frlm(exploit_m, explore_m, cfg.gamma_h).truncated(cfg.fb_terms);
    }
  }
  throw DataError("unknown model");
}

RankedList recommend(const UserProfile& profile, ModelKind kind, const FeedbackConfig& cfg,
                     const InvertedIndex& index, const EmbeddingStore* store,
                     const ContextKB* kb) {
  if (kind == ModelKind::bm25) {
    Pipeline p = prepare(profile, cfg, kb, store);
    return bm25_retrieve(p.tagq, index, profile.location, cfg.k1, cfg.b, cfg.top_poi);
  }
  TermDistribution final = final_distribution(profile, kind, cfg, index, store, kb);
  return kl_retrieve(final, index, profile.location, cfg.mu, cfg.top_poi);
}

}  // namespace poirec
