#include <doctest.h>

#include <cstdio>
#include <random>

#include "poirec/errors.hpp"
#include "poirec/eval.hpp"
#include "test_util.hpp"

using namespace poirec;
using testutil::check_close;

TEST_CASE("metrics match the scripted oracle on 20 rankings") {
  auto cases = testutil::load_json("expected/eval_expected.json")["metric_cases"];
  REQUIRE(cases.size() == 20);
  for (const auto& c : cases) {
    std::vector<int> run = c["run"].get<std::vector<int>>();
    std::vector<int> judged = run;
    for (int g : c["extra_judged"].get<std::vector<int>>()) judged.push_back(g);
    int cutoff = c["cutoff"].get<int>();

    std::vector<bool> rel;
    for (int g : run) rel.push_back(g >= cutoff);
    std::size_t total_rel = 0;
    for (int g : judged) {
      if (g >= cutoff) ++total_rel;
    }

    check_close(ndcg_at_k(run, judged, 5), c["ndcg5"].get<double>());
    check_close(ndcg_at_k(run, judged, 10), c["ndcg10"].get<double>());
    check_close(ndcg_at_k(run, judged, 0), c["ndcg"].get<double>());
    check_close(precision_at_k(rel, 5), c["p5"].get<double>());
    check_close(precision_at_k(rel, 10), c["p10"].get<double>());
    check_close(average_precision(rel, total_rel), c["ap"].get<double>());
    check_close(reciprocal_rank(rel), c["rr"].get<double>());
  }
}

TEST_CASE("metric edge cases") {
  // ideal ranking scores exactly 1
  CHECK(ndcg_at_k({3, 2, 1}, {3, 2, 1}, 0) == 1.0);
  CHECK(ndcg_at_k({3, 2, 1}, {1, 2, 3}, 5) == 1.0);
  // all zero grades
  CHECK(ndcg_at_k({0, 0, 0}, {0, 0, 0}, 5) == 0.0);
  // first doc relevant -> MRR 1
  CHECK(reciprocal_rank({true, false}) == 1.0);
  CHECK(reciprocal_rank({false, false}) == 0.0);
  // worked AP example: [1,0,1,0] with 2 relevant -> (1 + 2/3)/2
  check_close(average_precision({true, false, true, false}, 2), (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
  CHECK(average_precision({false, false}, 0) == 0.0);
}

TEST_CASE("nDCG and P@k ignore order below the cutoff") {
  std::vector<int> judged = {3, 2, 1, 0, 0, 0, 2};
  std::vector<int> a = {3, 2, 1, 0, 2, 0, 0};
  std::vector<int> b = {3, 2, 1, 0, 0, 2, 0};  // swap below rank 4? no - below k=3
  check_close(ndcg_at_k(a, judged, 3), ndcg_at_k(b, judged, 3), 1e-15);

  std::vector<bool> ra = {true, false, true, true, false};
  std::vector<bool> rb = {true, false, true, false, true};
  CHECK(precision_at_k(ra, 3) == precision_at_k(rb, 3));
}

TEST_CASE("moving a relevant doc up never hurts MAP or nDCG (fuzz)") {
  std::mt19937 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = 4 + rng() % 10;
    std::vector<int> grades(n);
    for (auto& g : grades) g = rng() % 3;
    std::vector<int> judged = grades;

    // pick a relevant doc below a non-relevant one and swap upward
    std::vector<std::size_t> rel_pos, zero_pos;
    for (std::size_t i = 0; i < n; ++i) (grades[i] > 0 ? rel_pos : zero_pos).push_back(i);
    if (rel_pos.empty() || zero_pos.empty()) continue;
    std::size_t r = rel_pos.back();
    std::size_t z = zero_pos.front();
    if (z > r) continue;

    std::vector<int> improved = grades;
    std::swap(improved[r], improved[z]);

    std::vector<bool> rel_a, rel_b;
    std::size_t total_rel = 0;
    for (int g : grades) {
      rel_a.push_back(g >= 1);
      if (g >= 1) ++total_rel;
    }
    for (int g : improved) rel_b.push_back(g >= 1);

    CHECK(ndcg_at_k(improved, judged, 0) >= ndcg_at_k(grades, judged, 0) - 1e-12);
    CHECK(average_precision(rel_b, total_rel) >= average_precision(rel_a, total_rel) - 1e-12);
  }
}

TEST_CASE("qrels and run files round-trip") {
  Qrels q;
  q.add("u1", "d1", 2);
  q.add("u1", "d2", 0);
  q.add("u2", "d9", 1);
  CHECK(q.grade("u1", "d1") == 2);
  CHECK(q.grade("u1", "dX") == 0);
  CHECK(q.relevant_count("u1", 1) == 1);
  CHECK(q.queries() == std::vector<std::string>{"u1", "u2"});

  Run run;
  run["u1"] = RankedList{{{"d1", 2.5}, {"d2", 1.25}}};
  run["u2"] = RankedList{{{"d9", -3.0}}};
  const std::string path = "run_roundtrip_tmp.txt";
  write_run(path, run, "tag-x");
  Run back = read_run(path);
  std::remove(path.c_str());

  REQUIRE(back.size() == 2);
  REQUIRE(back["u1"].size() == 2);
  CHECK(back["u1"].entries[0].doc_id == "d1");
  CHECK(back["u1"].entries[1].doc_id == "d2");
  check_close(back["u1"].entries[0].score, 2.5, 1e-6);
  CHECK(back["u2"].entries[0].doc_id == "d9");
}

TEST_CASE("run files with broken ranks or scores are rejected") {
  const std::string path = "run_bad_tmp.txt";
  {
    std::ofstream out(path);
    out << "u1 Q0 d1 1 0.5 t\nu1 Q0 d2 3 0.4 t\n";
  }
  CHECK_THROWS_WITH_AS(read_run(path), doctest::Contains("contiguous"), DataError);
  {
    std::ofstream out(path);
    out << "u1 Q0 d1 1 0.5 t\nu1 Q0 d2 2 0.9 t\n";
  }
  CHECK_THROWS_WITH_AS(read_run(path), doctest::Contains("nonincreasing"), DataError);
  std::remove(path.c_str());
}

TEST_CASE("evaluate aggregates per-query metrics against qrels") {
  Qrels q = Qrels::load(testutil::fixture("toy1/qrels.txt"));
  Run run;
  run["u1"] = RankedList{{{"d1", 5}, {"d2", 4}, {"d5", 3}, {"d3", 2}, {"d4", 1}}};
  MetricReport rep = evaluate(run, q);
  REQUIRE(rep.per_query.size() == 1);

  // grades at ranks: d1=2, d2=0, d5=2, d3=0, d4=1; judged multiset {2,2,1,0,0}
  std::vector<int> got = {2, 0, 2, 0, 1};
  std::vector<int> judged = {2, 2, 1, 0, 0};
  check_close(rep.per_query[0].second.ndcg5, ndcg_at_k(got, judged, 5), 1e-12);
  check_close(rep.mean.p5, 3.0 / 5.0, 1e-12);
  check_close(rep.mean.rr, 1.0, 1e-12);

  // unjudged queries are skipped
  run["ghost"] = RankedList{{{"d1", 1}}};
  MetricReport rep2 = evaluate(run, q);
  CHECK(rep2.per_query.size() == 1);

  // CSV and table renderings carry the mean row
  CHECK(report_csv(rep).find("mean,") != std::string::npos);
  CHECK(report_table(rep).find("mean") != std::string::npos);
}

TEST_CASE("paired t-test matches scipy within 1e-6") {
  auto tt = testutil::load_json("expected/eval_expected.json")["ttest"];
  for (const auto& c : tt) {
    std::vector<double> a = c["a"].get<std::vector<double>>();
    std::vector<double> b = c["b"].get<std::vector<double>>();
    TTestResult r = paired_t_test(a, b);
    CHECK(!r.degenerate);
    check_close(r.t, c["t"].get<double>(), 1e-6);
    check_close(r.p, c["p"].get<double>(), 1e-6);
  }

  auto sf = testutil::load_json("expected/eval_expected.json")["t_sf"];
  for (const auto& c : sf) {
    check_close(student_t_two_sided_p(c["t"].get<double>(), c["df"].get<double>()),
                c["p"].get<double>(), 1e-9);
  }
}

TEST_CASE("paired t-test degenerate conventions") {
  std::vector<double> a = {0.5, 0.6, 0.7};
  TTestResult same = paired_t_test(a, a);
  CHECK(same.degenerate);
  CHECK(same.p == 1.0);
  CHECK(same.t == 0.0);

  std::vector<double> shifted = {0.6, 0.7, 0.8};
  TTestResult shift = paired_t_test(shifted, a);
  CHECK(shift.degenerate);
  CHECK(shift.p == 0.0);
  CHECK(std::isinf(shift.t));

  std::vector<double> one = {0.5};
  CHECK_THROWS_AS(paired_t_test(one, one), DataError);
}

TEST_CASE("sweep runs every grid point and finds the argmax") {
  std::vector<GridAxis> grid = {{"x", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}}, {"y", {1, 2}}};
  SweepResult res = sweep(grid, [](const auto& assignment) {
    double x = assignment[0].second, y = assignment[1].second;
    if (y == 2 && x == 0.4) throw DataError("boom");
    MetricReport r;
    r.mean.ndcg5 = x * (y == 1 ? 1.0 : 0.5);  // argmax at x=1, y=1
    return r;
  });
  CHECK(res.cells.size() == 12);
  REQUIRE(res.best.has_value());
  const SweepCell& best = res.cells[*res.best];
  CHECK(best.assignment[0].second == 1.0);
  CHECK(best.assignment[1].second == 1.0);

  std::size_t failures = 0;
  for (const auto& c : res.cells) {
    if (!c.error.empty()) ++failures;
  }
  CHECK(failures == 1);

  std::string csv = sweep_csv(res, grid);
  CHECK(csv.find("x,y,ndcg5") == 0);
  CHECK(csv.find("boom") != std::string::npos);

  // single-point grid equals a direct call
  SweepResult single = sweep({{"x", {0.3}}}, [](const auto&) {
    MetricReport r;
    r.mean.ndcg5 = 0.77;
    return r;
  });
  CHECK(single.cells.size() == 1);
  check_close(single.cells[0].report->mean.ndcg5, 0.77, 1e-15);
}
