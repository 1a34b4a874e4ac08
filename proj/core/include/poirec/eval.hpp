#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poirec/index.hpp"

namespace poirec {

/// TREC relevance judgments: (query_id, doc_id) -> grade >= 0.
class Qrels {
 public:
  static Qrels load(const std::string& path);

  void add(const std::string& query_id, const std::string& doc_id, int grade);
  int grade(const std::string& query_id, const std::string& doc_id) const;
  /// All judged grades of a query (the ideal-ranking multiset).
  std::vector<int> judged_grades(const std::string& query_id) const;
  std::size_t relevant_count(const std::string& query_id, int binary_cutoff) const;
  std::vector<std::string> queries() const;
  bool has_query(const std::string& query_id) const;

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
};

/// One run in ranked order per query. Written/read in the standard
/// "query_id Q0 doc_id rank score run_tag" format.
using Run = std::map<std::string, RankedList>;

Run read_run(const std::string& path);
void write_run(const std::string& path, const Run& run, const std::string& run_tag);
void write_run(std::ostream& out, const Run& run, const std::string& run_tag);

/// DCG with linear gain and 1/log2(i+1) discount at 1-based rank i,
/// normalized by the ideal DCG over the judged grade multiset. k = 0 means
/// the full list. Queries with no relevant documents score 0.
double ndcg_at_k(const std::vector<int>& run_grades, const std::vector<int>& judged_grades,
                 std::size_t k);

double precision_at_k(const std::vector<bool>& rel, std::size_t k);
/// Mean of precision at relevant ranks, over the total judged-relevant count.
double average_precision(const std::vector<bool>& rel, std::size_t total_relevant);
/// Reciprocal rank of the first relevant document, 0 if none.
double reciprocal_rank(const std::vector<bool>& rel);

struct QueryMetrics {
  double ndcg5 = 0, ndcg10 = 0, ndcg = 0;
  double p5 = 0, p10 = 0, ap = 0, rr = 0;
};

struct MetricReport {
  std::vector<std::pair<std::string, QueryMetrics>> per_query;  // query-id order
  QueryMetrics mean;
};

/// Scores a run against qrels. Binary metrics binarize at grade >=
/// binary_cutoff. Every judged query in the run contributes; queries with
/// zero relevant documents contribute zeros unless skip_no_rel is set.
MetricReport evaluate(const Run& run, const Qrels& qrels, int binary_cutoff = 1,
                      bool skip_no_rel = false);

std::string report_table(const MetricReport& report);
std::string report_csv(const MetricReport& report);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool degenerate = false;  // zero-variance differences
};

/// Two-sided paired t-test with n-1 degrees of freedom. All-zero
/// differences give p = 1 (degenerate); nonzero constant differences give
/// p = 0 (degenerate, infinite t).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Student-t two-sided p-value, exposed for verification.
double student_t_two_sided_p(double t, double df);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepCell {
  std::vector<std::pair<std::string, double>> assignment;  // axis order
  std::optional<MetricReport> report;
  std::string error;  // nonempty when the cell failed
};

struct SweepResult {
  std::vector<SweepCell> cells;       // row-major over the grid, axis order
  std::optional<std::size_t> best;    // argmax by mean nDCG@5 among ok cells
};

/// Runs the callback once per grid point in deterministic row-major order.
/// Cell failures are recorded and the sweep continues.
SweepResult sweep(const std::vector<GridAxis>& grid,
                  const std::function<MetricReport(
                      const std::vector<std::pair<std::string, double>>&)>& evaluate_cell);

std::string sweep_csv(const SweepResult& result, const std::vector<GridAxis>& grid);

}  // namespace poirec
