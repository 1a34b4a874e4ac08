#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace poirec {

/// Sparse nonnegative weighted term map: the estimated relevance model.
/// Accumulation order never matters; ordered access goes through
/// sorted_entries() (weight descending, term ascending on ties).
class TermDistribution {
 public:
  TermDistribution() = default;

  void add(const std::string& term, double delta);
  void set(const std::string& term, double weight);
  double get(const std::string& term) const;
  bool contains(const std::string& term) const { return weights_.count(term) != 0; }

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  double sum() const;

  /// Scales weights to sum to 1. Throws DegenerateEstimate on zero mass.
  TermDistribution& normalize();
  bool is_normalized(double eps = 1e-9) const;

  /// Entries ordered by weight descending, term ascending on ties.
  std::vector<std::pair<std::string, double>> sorted_entries() const;

  /// Top-tau entries (same ordering), renormalized.
  TermDistribution truncated(std::size_t tau) const;

  /// lambda*a + (1-lambda)*b over the union of supports.
  static TermDistribution convex_mix(const TermDistribution& a, const TermDistribution& b,
                                     double lambda);

  /// Two-column text serialization: "term<TAB>weight" in sorted order.
  void save(const std::string& path) const;
  static TermDistribution load(const std::string& path);

  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

 private:
  std::unordered_map<std::string, double> weights_;
};

}  // namespace poirec
