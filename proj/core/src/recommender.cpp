#include "poirec/recommender.hpp"

#include <cinttypes>
#include <cstdio>

#include "poirec/errors.hpp"

namespace poirec {

std::string to_string(Model m) {
  switch (m) {
    case Model::bm25: return "bm25";
    case Model::term_select: return "term-select";
    case Model::bm25_termsel: return "bm25-termsel";
    case Model::rlm: return "rlm";
    case Model::kderlm: return "kderlm";
    case Model::most_popular: return "most-popular";
    case Model::profile_popular: return "profile-popular";
    case Model::content_tag: return "content-tag";
    case Model::hybrid: return "hybrid";
    case Model::frlm: return "frlm";
    case Model::kdefrlm: return "kdefrlm";
  }
  return "bm25";
}

Model model_from_string(std::string_view s) {
  for (Model m : all_models()) {
    if (to_string(m) == s) return m;
  }
  throw DataError("unknown model: " + std::string(s));
}

std::vector<Model> all_models() {
  return {Model::bm25,         Model::term_select,     Model::bm25_termsel, Model::rlm,
          Model::kderlm,       Model::most_popular,    Model::profile_popular,
          Model::content_tag,  Model::hybrid,          Model::frlm,         Model::kdefrlm};
}

FeedbackConfig model_defaults(Model m, PsiMode psi, FeedbackConfig base) {
  base.psi_mode = psi;
  switch (m) {
    case Model::rlm:
    case Model::frlm:
      base.fb_docs = 5;
      base.fb_terms = 25;
      base.gamma_h = 0.8;
      break;
    case Model::kderlm:
      base.fb_docs = 3;
      base.fb_terms = 80;
      break;
    case Model::kdefrlm:
      base.fb_docs = 2;
      base.fb_terms = 100;
      base.gamma_h = (psi == PsiMode::location) ? 0.6 : 0.7;
      break;
    case Model::term_select:
    case Model::bm25_termsel:
      base.fb_terms = 25;
      break;
    default:
      break;
  }
  return base;
}

Recommender::Recommender(const InvertedIndex* index, const EmbeddingStore* store,
                         const ContextKB* kb, const std::vector<UserProfile>* profiles,
                         FeedbackConfig cfg)
    : index_(index), store_(store), kb_(kb), profiles_(profiles), cfg_(cfg) {
  if (!index_) throw DataError("recommender requires an index");
  if (!profiles_) throw DataError("recommender requires profiles");
}

const UserProfile& Recommender::profile_by_id(const std::string& user_id) const {
  for (const auto& p : *profiles_) {
    if (p.user_id == user_id) return p;
  }
  throw DataError("unknown user '" + user_id + "'");
}

RankedList Recommender::run_user(const UserProfile& profile, Model model) const {
  const InvertedIndex& index = *index_;
  switch (model) {
    case Model::bm25:
      return recommend(profile, ModelKind::bm25, cfg_, index, store_, kb_);
    case Model::rlm:
      return recommend(profile, ModelKind::rlm, cfg_, index, store_, kb_);
    case Model::kderlm:
      return recommend(profile, ModelKind::kderlm, cfg_, index, store_, kb_);
    case Model::frlm:
      return recommend(profile, ModelKind::frlm, cfg_, index, store_, kb_);
    case Model::kdefrlm:
      return recommend(profile, ModelKind::kdefrlm, cfg_, index, store_, kb_);
    default:
      break;
  }

  UserProfile rel = relevant_subset(profile, cfg_.relevance_threshold);
  PsiScorer psi(cfg_.psi_mode, profile.context, kb_, store_);

  switch (model) {
    case Model::term_select: {
      TermDistribution q = term_selection(rel, cfg_.fb_terms, psi, index, cfg_.k1, cfg_.b);
      return bm25_retrieve(q, index, profile.location, cfg_.k1, cfg_.b, cfg_.top_poi);
    }
    case Model::bm25_termsel: {
      RankedList a = run_user(profile, Model::bm25);
      TermDistribution q = term_selection(rel, cfg_.fb_terms, psi, index, cfg_.k1, cfg_.b);
      RankedList b = bm25_retrieve(q, index, profile.location, cfg_.k1, cfg_.b, cfg_.top_poi);
      if (a.empty() || b.empty()) return a.empty() ? b : a;
      RankedList fused = combsum({a, b});
      if (fused.size() > cfg_.top_poi) fused.entries.resize(cfg_.top_poi);
      return fused;
    }
    case Model::most_popular: {
      TermDistribution q = most_popular_k(*profiles_, cfg_.relevance_threshold, psi);
      return bm25_retrieve(q, index, profile.location, cfg_.k1, cfg_.b, cfg_.top_poi);
    }
    case Model::profile_popular: {
      TermDistribution q = profile_popular_k(profile, cfg_.relevance_threshold, psi);
      return bm25_retrieve(q, index, profile.location, cfg_.k1, cfg_.b, cfg_.top_poi);
    }
    case Model::content_tag: {
      RankedList list =
          content_tag_match(rel, psi, index, profile.location, cfg_.fb_terms, cfg_.k1, cfg_.b);
      if (list.size() > cfg_.top_poi) list.entries.resize(cfg_.top_poi);
      return list;
    }
    case Model::hybrid: {
      RankedList a = run_user(profile, Model::kderlm);
      RankedList b =
          content_tag_match(rel, psi, index, profile.location, cfg_.fb_terms, cfg_.k1, cfg_.b);
      if (a.empty() || b.empty()) return a.empty() ? b : a;
      RankedList fused = combsum({a, b});
      if (fused.size() > cfg_.top_poi) fused.entries.resize(cfg_.top_poi);
      return fused;
    }
    default:
      throw DataError("unknown model");
  }
}

Run Recommender::run_all(Model model, const std::optional<std::string>& user_id) const {
  Run run;
  if (user_id) {
    const UserProfile& p = profile_by_id(*user_id);
    run[p.user_id] = run_user(p, model);
    return run;
  }
  for (const auto& p : *profiles_) {
    run[p.user_id] = run_user(p, model);
  }
  return run;
}

std::string config_digest(const FeedbackConfig& cfg, Model model) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "model=%s;psi=%s;M=%zu;tau=%zu;gamma=%.10g;lambda=%.10g;h=%.10g;sigma=%.10g;"
                "mu=%.10g;k1=%.10g;b=%.10g;eps=%.10g;thr=%.10g;top=%zu",
                to_string(model).c_str(), to_string(cfg.psi_mode).c_str(), cfg.fb_docs,
                cfg.fb_terms, cfg.gamma_h, cfg.lambda, cfg.kernel.h, cfg.kernel.sigma, cfg.mu,
                cfg.k1, cfg.b, cfg.floor_eps, cfg.relevance_threshold, cfg.top_poi);
  uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
  return hex;
}

std::string run_tag(const FeedbackConfig& cfg, Model model) {
  return to_string(model) + "-" + to_string(cfg.psi_mode) + "-" + config_digest(cfg, model);
}

}  // namespace poirec
