#include "poirec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "poirec/errors.hpp"

namespace poirec {

TermDistribution tag_query(const UserProfile& rel_profile, const PsiScorer& psi) {
  std::vector<std::string> tags = tag_union(rel_profile);
  if (tags.empty()) throw DataError("profile has no tags");
  TermDistribution q;
  for (const auto& t : tags) q.set(t, psi(t));
  return q.normalize();
}

TermDistribution term_selection(const UserProfile& rel_profile, std::size_t k_terms,
                                const PsiScorer& psi, const InvertedIndex& index, double k1,
                                double b) {
  if (k_terms == 0) throw DataError("k_terms must be >= 1");

  // Profile documents concatenated into a single pseudo-document.
  std::map<uint32_t, int64_t> tf;
  int64_t dl = 0;
  for (const auto& p : rel_profile.preferences) {
    auto ord = index.doc_ord(p.doc_id);
    if (!ord) throw DataError("unknown document '" + p.doc_id + "'");
    dl += index.doc_len(*ord);
    for (const auto& [tid, f] : index.doc_terms(*ord)) tf[tid] += f;
  }
  if (dl == 0) throw DataError("profile documents contain no text");

  const double n_docs = static_cast<double>(index.num_docs());
  const double avgdl = index.avg_doc_len();

  TermDistribution weights;
  for (const auto& [tid, f] : tf) {
    double df = static_cast<double>(index.doc_freq(tid));
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    double freq = static_cast<double>(f);
    double sat = freq * (k1 + 1.0) /
                 (freq + k1 * (1.0 - b + b * static_cast<double>(dl) / avgdl));
    double w = idf * sat;
    if (w > 0.0) weights.set(index.term(tid), w);
  }
  if (weights.empty()) throw DegenerateEstimate("term selection: no scored terms");

  TermDistribution top = weights.truncated(k_terms);
  TermDistribution out;
  for (const auto& [t, w] : top.sorted_entries()) {
    double v = w * psi(t);
    if (v > 0.0) out.set(t, v);
  }
  if (out.empty()) throw DegenerateEstimate("term selection: psi removed every term");
  return out.normalize();
}

RankedList combsum(const std::vector<RankedList>& lists) {
  if (lists.size() < 2) throw DataError("combsum requires at least two lists");
  for (const auto& l : lists) {
    if (l.empty()) throw DataError("combsum input list is empty");
  }

  std::map<std::string, double> fused;
  for (const auto& list : lists) {
    double lo = list.entries.front().score, hi = lo;
    for (const auto& e : list.entries) {
      lo = std::min(lo, e.score);
      hi = std::max(hi, e.score);
    }
    for (const auto& e : list.entries) {
      // Constant-score list: every document equally endorsed.
      double norm = (hi > lo) ? (e.score - lo) / (hi - lo) : 1.0;
      fused[e.doc_id] += norm;
    }
  }

  RankedList out;
  out.entries.reserve(fused.size());
  for (const auto& [id, score] : fused) out.entries.push_back({id, score});
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.doc_id < b.doc_id;
                   });
  return out;
}

namespace {

TermDistribution popular_tags(const std::vector<const UserProfile*>& profiles, double threshold,
                              const PsiScorer& psi, const char* what) {
  std::map<std::string, std::pair<double, std::size_t>> stats;  // tag -> (sum, count)
  for (const auto* p : profiles) {
    for (const auto& pref : p->preferences) {
      for (const auto& t : pref.tags) {
        auto& [sum, count] = stats[t];
        sum += pref.rating;
        ++count;
      }
    }
  }
  TermDistribution out;
  for (const auto& [tag, sc] : stats) {
    double mean = sc.first / static_cast<double>(sc.second);
    if (mean >= threshold) {
      double w = psi(tag);
      if (w > 0.0) out.set(tag, w);
    }
  }
  if (out.empty()) {
    throw DegenerateEstimate(std::string(what) + ": no tag reaches mean rating threshold");
  }
  return out.normalize();
}

}  // namespace

TermDistribution most_popular_k(const std::vector<UserProfile>& profiles, double threshold,
                                const PsiScorer& psi) {
  if (profiles.empty()) throw DataError("most_popular_k requires at least one profile");
  std::vector<const UserProfile*> ptrs;
  ptrs.reserve(profiles.size());
  for (const auto& p : profiles) ptrs.push_back(&p);
  return popular_tags(ptrs, threshold, psi, "most popular");
}

TermDistribution profile_popular_k(const UserProfile& profile, double threshold,
                                   const PsiScorer& psi) {
  return popular_tags({&profile}, threshold, psi, "profile popular");
}

RankedList content_tag_match(const UserProfile& rel_profile, const PsiScorer& psi,
                             const InvertedIndex& index, const std::string& location,
                             std::size_t content_terms, double k1, double b) {
  std::vector<uint32_t> cand = index.candidates(location);
  if (cand.empty()) return {};

  TermDistribution content_query =
      term_selection(rel_profile, content_terms, psi, index, k1, b);
  RankedList content = bm25_retrieve(content_query, index, location, k1, b, cand.size());
  std::unordered_map<std::string, double> content_score;
  for (const auto& e : content.entries) content_score[e.doc_id] = e.score;

  std::vector<std::string> tags = tag_union(rel_profile);
  std::set<std::string> tagset(tags.begin(), tags.end());

  // psi-weighted Jaccard-style overlap between profile tags and doc tags.
  std::vector<std::pair<uint32_t, std::pair<double, double>>> raw;  // ord -> (content, tag)
  raw.reserve(cand.size());
  for (uint32_t ord : cand) {
    double tag_score = 0.0;
    const auto& doc_tags = index.tags_of(ord);
    if (!doc_tags.empty() && !tagset.empty()) {
      std::size_t union_size = tagset.size();
      double overlap = 0.0;
      for (const auto& t : doc_tags) {
        if (tagset.count(t)) {
          overlap += psi(t);
        } else {
          ++union_size;
        }
      }
      tag_score = overlap / static_cast<double>(union_size);
    }
    auto it = content_score.find(index.doc_id(ord));
    double c = it == content_score.end() ? 0.0 : it->second;
    raw.emplace_back(ord, std::make_pair(c, tag_score));
  }

  auto minmax = [&](auto getter) {
    double lo = getter(raw.front().second), hi = lo;
    for (const auto& r : raw) {
      lo = std::min(lo, getter(r.second));
      hi = std::max(hi, getter(r.second));
    }
    return std::make_pair(lo, hi);
  };
  auto [clo, chi] = minmax([](const auto& p) { return p.first; });
  auto [tlo, thi] = minmax([](const auto& p) { return p.second; });

  RankedList out;
  out.entries.reserve(raw.size());
  for (const auto& [ord, scores] : raw) {
    double c = (chi > clo) ? (scores.first - clo) / (chi - clo) : 1.0;
    double t = (thi > tlo) ? (scores.second - tlo) / (thi - tlo) : 1.0;
    out.entries.push_back({index.doc_id(ord), c + t});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.doc_id < b.doc_id;
                   });
  return out;
}

}  // namespace poirec
