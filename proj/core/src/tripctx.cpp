#include "poirec/tripctx.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "poirec/errors.hpp"

namespace poirec {

namespace {

constexpr char kSep = '\x1f';

const std::set<std::string>& legal_categories() {
  static const std::set<std::string> cats = {"trip-type", "trip-duration", "accompanied-by"};
  return cats;
}

void check_category(const std::string& category, const std::string& value,
                    const std::string& where) {
  if (!legal_categories().count(category)) {
    throw DataError(where + ": unknown category '" + category + "'");
  }
  try {
    if (category == "trip-type") {
      trip_type_from_string(value);
    } else if (category == "trip-duration") {
      trip_duration_from_string(value);
    } else {
      accompanied_by_from_string(value);
    }
  } catch (const DataError&) {
    throw DataError(where + ": illegal value '" + value + "' for category '" + category + "'");
  }
}

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string to_string(PsiMode m) {
  switch (m) {
    case PsiMode::location: return "l";
    case PsiMode::single: return "s";
    case PsiMode::joint: return "j";
  }
  return "l";
}

PsiMode psi_mode_from_string(std::string_view s) {
  if (s == "l" || s == "location") return PsiMode::location;
  if (s == "s" || s == "single") return PsiMode::single;
  if (s == "j" || s == "joint") return PsiMode::joint;
  throw DataError("unknown psi mode: " + std::string(s));
}

std::string ContextKB::canon(std::string_view phrase) const {
  return canonical_phrase(phrase, pipeline_);
}

ContextKB ContextKB::empty(const PipelineConfig& pipeline) {
  ContextKB kb;
  kb.pipeline_ = pipeline;
  return kb;
}

ContextKB ContextKB::load(const std::string& path_single, const std::string& path_joint,
                          const PipelineConfig& pipeline) {
  ContextKB kb;
  kb.pipeline_ = pipeline;

  {
    std::ifstream in(path_single);
    if (!in) throw DataError("cannot open single-context KB: " + path_single);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const std::string where = path_single + ":" + std::to_string(lineno);
      auto f = split_tsv(line);
      if (f.size() != 4) throw DataError(where + ": expected 4 tab-separated fields");

      SingleContextEntry e;
      try {
        e.assessors = std::stoi(f[0]);
        e.score_raw = std::stod(f[1]);
      } catch (const std::exception&) {
        throw DataError(where + ": bad numeric field");
      }
      if (e.score_raw < -1.0 || e.score_raw > 1.0) {
        throw DataError(where + ": appropriateness score outside [-1,1]");
      }
      e.term = kb.canon(f[2]);
      if (e.term.empty()) throw DataError(where + ": term dissolved under the pipeline");

      auto eq = f[3].find('=');
      if (eq == std::string::npos) throw DataError(where + ": category must be 'name=value'");
      e.category = f[3].substr(0, eq);
      e.value = f[3].substr(eq + 1);
      check_category(e.category, e.value, where);

      e.score_norm = (e.score_raw + 1.0) / 2.0;
      std::string key = e.term + kSep + e.category + "=" + e.value;
      if (!kb.single_.emplace(key, e.score_norm).second) {
        throw DataError(where + ": duplicate (term, category) pair");
      }
      if (e.score_norm > 0.0) {
        kb.seeds_s_[e.category + "=" + e.value].push_back(e.term);
      }
    }
  }

  {
    std::ifstream in(path_joint);
    if (!in) throw DataError("cannot open joint-context KB: " + path_joint);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const std::string where = path_joint + ":" + std::to_string(lineno);
      auto f = split_tsv(line);
      if (f.size() != 6) throw DataError(where + ": expected 6 tab-separated fields");

      JointContextEntry e;
      double label;
      try {
        e.assessors = std::stoi(f[0]);
        label = std::stod(f[1]);
      } catch (const std::exception&) {
        throw DataError(where + ": bad numeric field");
      }
      if (label != 1.0 && label != -1.0) {
        throw DataError(where + ": joint label must be +1 or -1");
      }
      e.label = label > 0 ? 1 : -1;
      e.term = kb.canon(f[2]);
      if (e.term.empty()) throw DataError(where + ": term dissolved under the pipeline");
      e.context.trip_type = trip_type_from_string(f[3]);
      e.context.trip_duration = trip_duration_from_string(f[4]);
      e.context.accompanied_by = accompanied_by_from_string(f[5]);

      std::string key = e.term + kSep + e.context.key();
      if (!kb.joint_.emplace(key, e.label).second) {
        throw DataError(where + ": duplicate (term, context) pair");
      }
      if (e.label == 1) kb.seeds_j_[e.context.key()].push_back(e.term);
    }
  }

  for (auto& [_, seeds] : kb.seeds_s_) std::sort(seeds.begin(), seeds.end());
  for (auto& [_, seeds] : kb.seeds_j_) std::sort(seeds.begin(), seeds.end());
  return kb;
}

double ContextKB::kappa_s(std::string_view term, std::string_view category,
                          std::string_view value) const {
  std::string key = canon(term);
  key += kSep;
  key += category;
  key += '=';
  key += value;
  auto it = single_.find(key);
  return it == single_.end() ? 0.0 : it->second;
}

int ContextKB::kappa_j(std::string_view term, const TripContext& ctx) const {
  std::string key = canon(term) + kSep + ctx.key();
  auto it = joint_.find(key);
  return (it != joint_.end() && it->second == 1) ? 1 : 0;
}

const std::vector<std::string>& ContextKB::seeds_single(std::string_view category,
                                                        std::string_view value) const {
  static const std::vector<std::string> none;
  std::string key(category);
  key += '=';
  key += value;
  auto it = seeds_s_.find(key);
  return it == seeds_s_.end() ? none : it->second;
}

const std::vector<std::string>& ContextKB::seeds_joint(const TripContext& ctx) const {
  static const std::vector<std::string> none;
  auto it = seeds_j_.find(ctx.key());
  return it == seeds_j_.end() ? none : it->second;
}

PsiScorer::PsiScorer(PsiMode mode, std::optional<TripContext> context, const ContextKB* kb,
                     const EmbeddingStore* store)
    : mode_(mode), context_(std::move(context)), kb_(kb), store_(store) {
  if (mode_ == PsiMode::location) return;
  if (!context_) {
    throw DataError("psi mode '" + to_string(mode_) + "' requires a trip context");
  }
  if (!kb_ || !store_) {
    throw DataError("psi mode '" + to_string(mode_) +
                    "' requires a knowledge base and embeddings");
  }
  if (mode_ == PsiMode::single) {
    seed_sets_.push_back(&kb_->seeds_single("trip-type", to_string(context_->trip_type)));
    seed_sets_.push_back(
        &kb_->seeds_single("trip-duration", to_string(context_->trip_duration)));
    seed_sets_.push_back(
        &kb_->seeds_single("accompanied-by", to_string(context_->accompanied_by)));
  } else {
    seed_sets_.push_back(&kb_->seeds_joint(*context_));
  }
}

double PsiScorer::compute(const std::string& term) const {
  // Empty seed set carries no evidence: neutral 1 keeps multiplicative
  // models identical to their location-only counterparts.
  double total = 0.0;
  std::size_t n = 0;
  for (const auto* seeds : seed_sets_) {
    if (seeds->empty()) {
      total += 1.0;
    } else {
      total += max_sim(*store_, term, *seeds).value;
    }
    ++n;
  }
  return total / static_cast<double>(n);
}

double PsiScorer::operator()(std::string_view term) const {
  if (mode_ == PsiMode::location) return 1.0;
  std::string key(term);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  double v = compute(key);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->values.emplace(std::move(key), v);
  return v;
}

double psi_single_category(std::string_view term, std::string_view category,
                           std::string_view value, const ContextKB& kb,
                           const EmbeddingStore& store) {
  const auto& seeds = kb.seeds_single(category, value);
  if (seeds.empty()) return 1.0;
  return max_sim(store, std::string(term), seeds).value;
}

}  // namespace poirec
