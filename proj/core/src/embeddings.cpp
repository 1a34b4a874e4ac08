#include "poirec/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "poirec/errors.hpp"

namespace poirec {

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DataError("embedding dimension must be positive");
}

void EmbeddingStore::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw DataError("vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                    ", expected " + std::to_string(dim_));
  }
  double norm2 = 0.0;
  for (double v : vec) norm2 += v * v;
  if (!(norm2 > 0.0)) throw DataError("zero vector for '" + word + "'");
  double inv = 1.0 / std::sqrt(norm2);
  for (double& v : vec) v *= inv;
  if (!vectors_.emplace(word, std::move(vec)).second) {
    throw DataError("duplicate embedding for '" + word + "'");
  }
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings: " + path);

  std::string header;
  if (!std::getline(in, header)) throw DataError("empty embeddings file: " + path);
  std::istringstream hs(header);
  std::size_t count = 0, dim = 0;
  if (!(hs >> count >> dim) || dim == 0) {
    throw DataError(path + ":1: expected header 'count dim'");
  }

  EmbeddingStore store(dim);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vec;
    vec.reserve(dim);
    double v;
    while (ss >> v) vec.push_back(v);
    if (word.empty() || vec.size() != dim) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(dim) + " components");
    }
    store.insert(word, std::move(vec));
  }
  if (store.size() != count) {
    throw DataError(path + ": header declares " + std::to_string(count) + " vectors, found " +
                    std::to_string(store.size()));
  }
  return store;
}

std::span<const double> EmbeddingStore::vector(const std::string& word) const {
  auto it = vectors_.find(word);
  if (it == vectors_.end()) throw DataError("word '" + word + "' not in embedding store");
  return it->second;
}

std::optional<double> cosine(const EmbeddingStore& store, const std::string& w,
                             const std::string& t) {
  if (!store.contains(w) || !store.contains(t)) return std::nullopt;
  auto a = store.vector(w);
  auto b = store.vector(t);
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot;
}

std::optional<double> gaussian_kernel(const EmbeddingStore& store, const std::string& w,
                                      const std::string& t, const KernelConfig& cfg) {
  if (cfg.h <= 0.0 || cfg.sigma <= 0.0) throw DataError("kernel h and sigma must be positive");
  auto cos = cosine(store, w, t);
  if (!cos) return std::nullopt;
  // Unit vectors: |w-t|^2 = 2 - 2 cos.
  double dist2 = std::max(0.0, 2.0 - 2.0 * *cos);
  double denom = 2.0 * cfg.sigma * cfg.sigma * cfg.h * cfg.h;
  return std::exp(-dist2 / denom) / (cfg.sigma * std::sqrt(2.0 * std::numbers::pi));
}

MaxSimResult max_sim(const EmbeddingStore& store, const std::string& w,
                     std::span<const std::string> seeds) {
  if (seeds.empty()) throw DataError("max_sim requires a nonempty seed set");
  if (!store.contains(w)) return {1.0, true};
  bool any = false;
  double best = 0.0;
  for (const auto& s : seeds) {
    auto cos = cosine(store, w, s);
    if (!cos) continue;
    any = true;
    best = std::max(best, std::clamp(*cos, 0.0, 1.0));
  }
  if (!any) return {1.0, true};
  return {best, false};
}

}  // namespace poirec
