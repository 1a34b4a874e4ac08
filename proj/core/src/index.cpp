#include "poirec/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "poirec/errors.hpp"

namespace poirec {

namespace {

constexpr uint32_t kMagic = 0x50494458;  // "PIDX"
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("truncated index file");
  return v;
}

void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& in) {
  uint32_t n = read_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw DataError("truncated index file");
  return s;
}

}  // namespace

InvertedIndex InvertedIndex::build(const std::vector<PoiDocument>& docs,
                                   const PipelineConfig& pipeline) {
  if (docs.empty()) throw DataError("cannot build an index over an empty collection");

  InvertedIndex idx;
  idx.pipeline_ = pipeline;

  std::vector<const PoiDocument*> ordered;
  ordered.reserve(docs.size());
  for (const auto& d : docs) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const PoiDocument* a, const PoiDocument* b) { return a->id < b->id; });
  for (size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->id == ordered[i - 1]->id) {
      throw DataError("duplicate POI id '" + ordered[i]->id + "'");
    }
  }

  // Term ids in lexicographic order.
  std::map<std::string, uint32_t> term_ids;
  for (const auto* d : ordered) {
    for (const auto& t : d->tokens) term_ids.emplace(t, 0);
  }
  idx.terms_.reserve(term_ids.size());
  for (auto& [t, tid] : term_ids) {
    tid = static_cast<uint32_t>(idx.terms_.size());
    idx.terms_.push_back(t);
  }

  idx.docs_.reserve(ordered.size());
  idx.forward_.reserve(ordered.size());
  for (const auto* d : ordered) {
    DocInfo info;
    info.id = d->id;
    info.city = d->city;
    info.len = static_cast<int64_t>(d->tokens.size());
    info.tags = d->tags;

    std::map<uint32_t, uint32_t> counts;
    for (const auto& t : d->tokens) ++counts[term_ids[t]];
    idx.forward_.emplace_back(counts.begin(), counts.end());
    idx.docs_.push_back(std::move(info));
  }

  idx.finalize();
  return idx;
}

void InvertedIndex::finalize() {
  postings_.assign(terms_.size(), {});
  coll_tf_.assign(terms_.size(), 0);
  collection_len_ = 0;
  doc_ord_.clear();
  term_id_.clear();
  city_docs_.clear();

  for (uint32_t tid = 0; tid < terms_.size(); ++tid) term_id_[terms_[tid]] = tid;
  for (uint32_t ord = 0; ord < docs_.size(); ++ord) {
    doc_ord_[docs_[ord].id] = ord;
    city_docs_[docs_[ord].city].push_back(ord);
    collection_len_ += docs_[ord].len;
    for (const auto& [tid, tf] : forward_[ord]) {
      postings_[tid].push_back({ord, tf});
      coll_tf_[tid] += tf;
    }
  }
}

std::optional<uint32_t> InvertedIndex::doc_ord(const std::string& doc_id) const {
  auto it = doc_ord_.find(doc_id);
  if (it == doc_ord_.end()) return std::nullopt;
  return it->second;
}

std::optional<uint32_t> InvertedIndex::term_id(const std::string& term) const {
  auto it = term_id_.find(term);
  if (it == term_id_.end()) return std::nullopt;
  return it->second;
}

int64_t InvertedIndex::coll_tf(const std::string& term) const {
  auto tid = term_id(term);
  return tid ? coll_tf_[*tid] : 0;
}

uint32_t InvertedIndex::tf(uint32_t tid, uint32_t ord) const {
  const auto& plist = postings_[tid];
  auto it = std::lower_bound(plist.begin(), plist.end(), ord,
                             [](const Posting& p, uint32_t o) { return p.doc < o; });
  if (it == plist.end() || it->doc != ord) return 0;
  return it->tf;
}

int64_t InvertedIndex::tf(const std::string& term, const std::string& doc) const {
  auto tid = term_id(term);
  auto ord = doc_ord(doc);
  if (!ord) throw DataError("unknown document '" + doc + "'");
  if (!tid) return 0;
  return tf(*tid, *ord);
}

std::vector<uint32_t> InvertedIndex::candidates(const std::optional<std::string>& city) const {
  if (!city) {
    std::vector<uint32_t> all(docs_.size());
    for (uint32_t i = 0; i < docs_.size(); ++i) all[i] = i;
    return all;
  }
  auto it = city_docs_.find(*city);
  if (it == city_docs_.end()) return {};
  return it->second;
}

void InvertedIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write index: " + path);
  write_u32(out, kMagic);
  write_u32(out, kVersion);

  write_u32(out, pipeline_.lowercase ? 1 : 0);
  write_str(out, to_string(pipeline_.stemmer));
  write_u32(out, pipeline_.stopword_list ? 1 : 0);
  if (pipeline_.stopword_list) {
    write_u32(out, static_cast<uint32_t>(pipeline_.stopword_list->size()));
    for (const auto& w : *pipeline_.stopword_list) write_str(out, w);
  }

  write_u32(out, static_cast<uint32_t>(terms_.size()));
  for (const auto& t : terms_) write_str(out, t);

  write_u32(out, static_cast<uint32_t>(docs_.size()));
  for (uint32_t ord = 0; ord < docs_.size(); ++ord) {
    const DocInfo& d = docs_[ord];
    write_str(out, d.id);
    write_str(out, d.city);
    write_u32(out, static_cast<uint32_t>(d.tags.size()));
    for (const auto& t : d.tags) write_str(out, t);
    write_u32(out, static_cast<uint32_t>(forward_[ord].size()));
    for (const auto& [tid, tf] : forward_[ord]) {
      write_u32(out, tid);
      write_u32(out, tf);
    }
  }
  if (!out) throw DataError("error writing index: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index: " + path);
  if (read_u32(in) != kMagic) throw DataError("not an index file: " + path);
  if (uint32_t v = read_u32(in); v != kVersion) {
    throw DataError("unsupported index version " + std::to_string(v));
  }

  InvertedIndex idx;
  idx.pipeline_.lowercase = read_u32(in) != 0;
  idx.pipeline_.stemmer = stemmer_from_string(read_str(in));
  if (read_u32(in) != 0) {
    uint32_t n = read_u32(in);
    std::set<std::string> stop;
    for (uint32_t i = 0; i < n; ++i) stop.insert(read_str(in));
    idx.pipeline_.stopword_list = std::move(stop);
  } else {
    idx.pipeline_.stopword_list.reset();
  }

  uint32_t nterms = read_u32(in);
  idx.terms_.reserve(nterms);
  for (uint32_t i = 0; i < nterms; ++i) idx.terms_.push_back(read_str(in));

  uint32_t ndocs = read_u32(in);
  idx.docs_.reserve(ndocs);
  idx.forward_.reserve(ndocs);
  for (uint32_t ord = 0; ord < ndocs; ++ord) {
    DocInfo d;
    d.id = read_str(in);
    d.city = read_str(in);
    uint32_t ntags = read_u32(in);
    for (uint32_t i = 0; i < ntags; ++i) d.tags.push_back(read_str(in));
    uint32_t nt = read_u32(in);
    std::vector<std::pair<uint32_t, uint32_t>> fwd;
    fwd.reserve(nt);
    for (uint32_t i = 0; i < nt; ++i) {
      uint32_t tid = read_u32(in);
      uint32_t tf = read_u32(in);
      if (tid >= nterms) throw DataError("corrupt index: term id out of range");
      d.len += tf;
      fwd.emplace_back(tid, tf);
    }
    idx.forward_.push_back(std::move(fwd));
    idx.docs_.push_back(std::move(d));
  }

  idx.finalize();
  return idx;
}

double lm_prob_ord(const InvertedIndex& index, uint32_t tid, uint32_t ord, double mu) {
  double tf = static_cast<double>(index.tf(tid, ord));
  double prior = static_cast<double>(index.coll_tf(tid)) /
                 static_cast<double>(index.collection_len());
  return (tf + mu * prior) / (static_cast<double>(index.doc_len(ord)) + mu);
}

double lm_prob(const InvertedIndex& index, const std::string& term, const std::string& doc_id,
               double mu) {
  if (mu < 0.0) throw DataError("mu must be nonnegative");
  auto ord = index.doc_ord(doc_id);
  if (!ord) throw DataError("unknown document '" + doc_id + "'");
  auto tid = index.term_id(term);
  if (!tid) return 0.0;  // absent everywhere: no collection mass either
  return lm_prob_ord(index, *tid, *ord, mu);
}

namespace {

RankedList take_top(std::vector<std::pair<uint32_t, double>> scored, const InvertedIndex& index,
                    std::size_t top_k) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // ordinal order == doc-id order
  });
  if (scored.size() > top_k) scored.resize(top_k);
  RankedList out;
  out.entries.reserve(scored.size());
  for (const auto& [ord, score] : scored) {
    out.entries.push_back({index.doc_id(ord), score});
  }
  return out;
}

}  // namespace

RankedList bm25_retrieve(const TermDistribution& query, const InvertedIndex& index,
                         const std::optional<std::string>& location, double k1, double b,
                         std::size_t top_k) {
  if (query.empty()) throw DataError("empty query");
  if (top_k == 0) throw DataError("top_k must be >= 1");

  std::vector<uint32_t> cand = index.candidates(location);
  if (cand.empty()) return {};
  std::vector<char> in_cand(index.num_docs(), 0);
  for (uint32_t ord : cand) in_cand[ord] = 1;

  const double n_docs = static_cast<double>(index.num_docs());
  const double avgdl = index.avg_doc_len();

  std::unordered_map<uint32_t, double> acc;
  for (const auto& [term, qw] : query.sorted_entries()) {
    auto tid = index.term_id(term);
    if (!tid) continue;
    const auto& plist = index.postings(*tid);
    double df = static_cast<double>(plist.size());
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto& p : plist) {
      if (!in_cand[p.doc]) continue;
      double tf = static_cast<double>(p.tf);
      double dl = static_cast<double>(index.doc_len(p.doc));
      double sat = tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
      acc[p.doc] += qw * idf * sat;
    }
  }

  std::vector<std::pair<uint32_t, double>> scored(acc.begin(), acc.end());
  return take_top(std::move(scored), index, top_k);
}

RankedList kl_retrieve(const TermDistribution& theta, const InvertedIndex& index,
                       const std::optional<std::string>& location, double mu,
                       std::size_t top_k) {
  if (theta.empty()) throw DataError("empty query distribution");
  if (!theta.is_normalized()) throw DataError("query distribution is not normalized");
  if (top_k == 0) throw DataError("top_k must be >= 1");

  std::vector<uint32_t> cand = index.candidates(location);
  if (cand.empty()) return {};

  auto entries = theta.sorted_entries();
  std::vector<std::pair<uint32_t, double>> query_terms;  // (tid, weight)
  query_terms.reserve(entries.size());
  for (const auto& [term, w] : entries) {
    if (auto tid = index.term_id(term)) query_terms.emplace_back(*tid, w);
  }

  std::vector<std::pair<uint32_t, double>> scored;
  scored.reserve(cand.size());
  for (uint32_t ord : cand) {
    double score = 0.0;
    for (const auto& [tid, w] : query_terms) {
      double p = lm_prob_ord(index, tid, ord, mu);
      if (p > 0.0) score += w * std::log(p);
    }
    scored.emplace_back(ord, score);
  }
  return take_top(std::move(scored), index, top_k);
}

}  // namespace poirec
