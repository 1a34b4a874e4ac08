#include "poirec/term_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "poirec/errors.hpp"

namespace poirec {

void TermDistribution::add(const std::string& term, double delta) {
  if (delta < 0.0) throw DataError("negative weight delta for term '" + term + "'");
  if (delta == 0.0) return;
  weights_[term] += delta;
}

void TermDistribution::set(const std::string& term, double weight) {
  if (weight < 0.0) throw DataError("negative weight for term '" + term + "'");
  if (weight == 0.0) {
    weights_.erase(term);
  } else {
    weights_[term] = weight;
  }
}

double TermDistribution::get(const std::string& term) const {
  auto it = weights_.find(term);
  return it == weights_.end() ? 0.0 : it->second;
}

double TermDistribution::sum() const {
  double s = 0.0;
  for (const auto& [_, w] : weights_) s += w;
  return s;
}

TermDistribution& TermDistribution::normalize() {
  double s = sum();
  if (!(s > 0.0)) throw DegenerateEstimate("all term weights are zero");
  for (auto& [_, w] : weights_) w /= s;
  return *this;
}

bool TermDistribution::is_normalized(double eps) const {
  return std::fabs(sum() - 1.0) <= eps;
}

std::vector<std::pair<std::string, double>> TermDistribution::sorted_entries() const {
  std::vector<std::pair<std::string, double>> out(weights_.begin(), weights_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

TermDistribution TermDistribution::truncated(std::size_t tau) const {
  auto entries = sorted_entries();
  if (entries.size() > tau) entries.resize(tau);
  TermDistribution out;
  for (auto& [t, w] : entries) out.set(t, w);
  return out.normalize();
}

TermDistribution TermDistribution::convex_mix(const TermDistribution& a,
                                              const TermDistribution& b, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw DataError("mix weight must be in [0,1]");
  TermDistribution out;
  for (const auto& [t, w] : a.weights_) out.add(t, lambda * w);
  for (const auto& [t, w] : b.weights_) out.add(t, (1.0 - lambda) * w);
  return out;
}

void TermDistribution::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write term distribution: " + path);
  char buf[64];
  for (const auto& [t, w] : sorted_entries()) {
    std::snprintf(buf, sizeof(buf), "%.12e", w);
    out << t << '\t' << buf << '\n';
  }
}

TermDistribution TermDistribution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read term distribution: " + path);
  TermDistribution d;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string term;
    double w;
    if (!(ss >> term >> w)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad term-weight line");
    }
    d.set(term, w);
  }
  return d;
}

}  // namespace poirec
