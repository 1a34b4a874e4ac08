#include "poirec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "poirec/errors.hpp"

namespace poirec {

Qrels Qrels::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open qrels: " + path);
  Qrels q;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid, zero, did;
    int grade;
    if (!(ss >> qid >> zero >> did >> grade)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad qrels line");
    }
    q.add(qid, did, grade);
  }
  return q;
}

void Qrels::add(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0) throw DataError("negative relevance grade");
  judgments_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

std::vector<int> Qrels::judged_grades(const std::string& query_id) const {
  std::vector<int> grades;
  auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return grades;
  grades.reserve(q->second.size());
  for (const auto& [_, g] : q->second) grades.push_back(g);
  return grades;
}

std::size_t Qrels::relevant_count(const std::string& query_id, int binary_cutoff) const {
  std::size_t n = 0;
  for (int g : judged_grades(query_id)) {
    if (g >= binary_cutoff) ++n;
  }
  return n;
}

std::vector<std::string> Qrels::queries() const {
  std::vector<std::string> out;
  out.reserve(judgments_.size());
  for (const auto& [qid, _] : judgments_) out.push_back(qid);
  return out;
}

bool Qrels::has_query(const std::string& query_id) const {
  return judgments_.count(query_id) != 0;
}

Run read_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run file: " + path);
  Run run;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string qid, q0, did, tag;
    long rank;
    double score;
    if (!(ss >> qid >> q0 >> did >> rank >> score >> tag)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad run line");
    }
    RankedList& list = run[qid];
    if (rank != static_cast<long>(list.size()) + 1) {
      throw DataError(path + ":" + std::to_string(lineno) + ": ranks must be contiguous from 1");
    }
    if (!list.empty() && score > list.entries.back().score) {
      throw DataError(path + ":" + std::to_string(lineno) + ": scores must be nonincreasing");
    }
    list.entries.push_back({did, score});
  }
  return run;
}

void write_run(std::ostream& out, const Run& run, const std::string& run_tag) {
  char buf[64];
  for (const auto& [qid, list] : run) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6f", list.entries[i].score);
      out << qid << " Q0 " << list.entries[i].doc_id << ' ' << (i + 1) << ' ' << buf << ' '
          << run_tag << '\n';
    }
  }
}

void write_run(const std::string& path, const Run& run, const std::string& run_tag) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write run file: " + path);
  write_run(out, run, run_tag);
}

namespace {

double dcg(const std::vector<int>& grades, std::size_t k) {
  std::size_t n = (k == 0) ? grades.size() : std::min(k, grades.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(grades[i]) / std::log2(static_cast<double>(i + 2));
  }
  return sum;
}

}  // namespace

double ndcg_at_k(const std::vector<int>& run_grades, const std::vector<int>& judged_grades,
                 std::size_t k) {
  std::vector<int> ideal = judged_grades;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = dcg(ideal, k);
  if (idcg <= 0.0) return 0.0;
  return dcg(run_grades, k) / idcg;
}

double precision_at_k(const std::vector<bool>& rel, std::size_t k) {
  if (k == 0) throw DataError("precision cutoff must be >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, rel.size()); ++i) {
    if (rel[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const std::vector<bool>& rel, std::size_t total_relevant) {
  if (total_relevant == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (rel[i]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double reciprocal_rank(const std::vector<bool>& rel) {
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (rel[i]) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

MetricReport evaluate(const Run& run, const Qrels& qrels, int binary_cutoff,
                      bool skip_no_rel) {
  MetricReport report;
  QueryMetrics sum;
  std::size_t n = 0;

  for (const auto& [qid, list] : run) {
    if (!qrels.has_query(qid)) continue;
    std::vector<int> judged = qrels.judged_grades(qid);
    std::size_t total_rel = qrels.relevant_count(qid, binary_cutoff);
    if (skip_no_rel && total_rel == 0) continue;

    std::vector<int> grades;
    std::vector<bool> rel;
    grades.reserve(list.size());
    rel.reserve(list.size());
    for (const auto& e : list.entries) {
      int g = qrels.grade(qid, e.doc_id);
      grades.push_back(g);
      rel.push_back(g >= binary_cutoff);
    }

    QueryMetrics m;
    m.ndcg5 = ndcg_at_k(grades, judged, 5);
    m.ndcg10 = ndcg_at_k(grades, judged, 10);
    m.ndcg = ndcg_at_k(grades, judged, 0);
    m.p5 = precision_at_k(rel, 5);
    m.p10 = precision_at_k(rel, 10);
    m.ap = average_precision(rel, total_rel);
    m.rr = reciprocal_rank(rel);

    report.per_query.emplace_back(qid, m);
    sum.ndcg5 += m.ndcg5;
    sum.ndcg10 += m.ndcg10;
    sum.ndcg += m.ndcg;
    sum.p5 += m.p5;
    sum.p10 += m.p10;
    sum.ap += m.ap;
    sum.rr += m.rr;
    ++n;
  }

  if (n > 0) {
    double d = static_cast<double>(n);
    report.mean = {sum.ndcg5 / d, sum.ndcg10 / d, sum.ndcg / d,
                   sum.p5 / d,    sum.p10 / d,   sum.ap / d,  sum.rr / d};
  }
  return report;
}

namespace {

std::string fmt_row(const std::string& label, const QueryMetrics& m, bool csv) {
  char buf[256];
  if (csv) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", label.c_str(),
                  m.ndcg5, m.ndcg10, m.ndcg, m.p5, m.p10, m.ap, m.rr);
  } else {
    std::snprintf(buf, sizeof(buf), "%-16s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f",
                  label.c_str(), m.ndcg5, m.ndcg10, m.ndcg, m.p5, m.p10, m.ap, m.rr);
  }
  return buf;
}

}  // namespace

std::string report_table(const MetricReport& report) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-16s %8s %8s %8s %8s %8s %8s %8s", "query", "nDCG@5",
                "nDCG@10", "nDCG", "P@5", "P@10", "MAP", "MRR");
  out << buf << '\n';
  for (const auto& [qid, m] : report.per_query) out << fmt_row(qid, m, false) << '\n';
  out << fmt_row("mean", report.mean, false) << '\n';
  return out.str();
}

std::string report_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "query,ndcg5,ndcg10,ndcg,p5,p10,map,mrr\n";
  for (const auto& [qid, m] : report.per_query) out << fmt_row(qid, m, true) << '\n';
  out << fmt_row("mean", report.mean, true) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Student-t p-value via the regularized incomplete beta function.

namespace {

double beta_cont_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-15;
  constexpr double kTiny = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                  b * std::log(1.0 - x);
  double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cont_fraction(a, b, x) / a;
  }
  return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw DataError("degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired t-test requires equal-length samples");
  if (a.size() < 2) throw DataError("paired t-test requires at least two pairs");

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  double mean = 0.0;
  for (double d : diff) mean += d;
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (double d : diff) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n - 1);

  if (var == 0.0) {
    if (mean == 0.0) return {0.0, 1.0, true};  // identical samples
    double inf = std::numeric_limits<double>::infinity();
    return {mean > 0 ? inf : -inf, 0.0, true};  // constant nonzero shift
  }

  double t = mean / std::sqrt(var / static_cast<double>(n));
  double p = student_t_two_sided_p(t, static_cast<double>(n - 1));
  return {t, p, false};
}

SweepResult sweep(const std::vector<GridAxis>& grid,
                  const std::function<MetricReport(
                      const std::vector<std::pair<std::string, double>>&)>& evaluate_cell) {
  if (grid.empty()) throw DataError("sweep requires at least one axis");
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw DataError("sweep axis '" + axis.name + "' is empty");
  }

  SweepResult result;
  std::vector<std::size_t> idx(grid.size(), 0);
  double best_score = -1.0;
  while (true) {
    SweepCell cell;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cell.assignment.emplace_back(grid[i].name, grid[i].values[idx[i]]);
    }
    try {
      cell.report = evaluate_cell(cell.assignment);
      if (cell.report->mean.ndcg5 > best_score) {
        best_score = cell.report->mean.ndcg5;
        result.best = result.cells.size();
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    result.cells.push_back(std::move(cell));

    // Row-major increment, last axis fastest.
    std::size_t pos = grid.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < grid[pos].values.size()) break;
      idx[pos] = 0;
      if (pos == 0) return result;
    }
  }
}

std::string sweep_csv(const SweepResult& result, const std::vector<GridAxis>& grid) {
  std::ostringstream out;
  for (const auto& axis : grid) out << axis.name << ',';
  out << "ndcg5,ndcg10,ndcg,p5,p10,map,mrr,error\n";
  char buf[64];
  for (const auto& cell : result.cells) {
    for (const auto& [_, v] : cell.assignment) {
      std::snprintf(buf, sizeof(buf), "%g", v);
      out << buf << ',';
    }
    if (cell.report) {
      const auto& m = cell.report->mean;
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", m.ndcg5, m.ndcg10,
                    m.ndcg, m.p5, m.p10, m.ap, m.rr);
      out << buf << ",\n";
    } else {
      std::string msg = cell.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << ",,,,,,," << msg << '\n';
    }
  }
  return out.str();
}

}  // namespace poirec
