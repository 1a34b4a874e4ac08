#pragma once

#include <fstream>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "poirec/corpus.hpp"
#include "poirec/index.hpp"
#include "poirec/term_distribution.hpp"

namespace testutil {

inline std::string fixture(const std::string& rel) {
  return std::string(POIREC_FIXTURES) + "/" + rel;
}

inline nlohmann::json load_json(const std::string& rel) {
  std::ifstream in(fixture(rel));
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

/// Toy fixtures use the plain pipeline: lowercase, no stopwords, no stemming.
inline poirec::PipelineConfig toy_pipeline() {
  return poirec::PipelineConfig::plain();
}

inline poirec::InvertedIndex toy_index(const std::string& name) {
  auto docs = poirec::load_pois(fixture(name + "/pois.jsonl"), toy_pipeline());
  return poirec::InvertedIndex::build(docs, toy_pipeline());
}

inline std::vector<poirec::UserProfile> toy_profiles(const std::string& name) {
  return poirec::load_profiles(fixture(name + "/profiles.jsonl"), toy_pipeline());
}

inline void check_close(double got, double want, double tol = 1e-9) {
  CHECK(std::fabs(got - want) <= tol);
}

/// Distribution equality against an oracle JSON object of term -> weight.
inline void check_distribution(const poirec::TermDistribution& got, const nlohmann::json& want,
                               double tol = 1e-9) {
  CHECK(got.size() == want.size());
  for (const auto& [term, weight] : want.items()) {
    INFO("term: ", term);
    check_close(got.get(term), weight.get<double>(), tol);
  }
}

inline void check_ranking(const poirec::RankedList& got, const std::vector<std::string>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    INFO("rank ", i);
    CHECK(got.entries[i].doc_id == want[i]);
  }
}

}  // namespace testutil
