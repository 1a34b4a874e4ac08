#include <doctest.h>

#include <sstream>

#include "poirec/errors.hpp"
#include "poirec/recommender.hpp"
#include "test_util.hpp"

using namespace poirec;
using testutil::fixture;

namespace {

struct Stack {
  InvertedIndex index;
  EmbeddingStore store;
  ContextKB kb;
  std::vector<UserProfile> profiles;

  explicit Stack(const std::string& name)
      : index(testutil::toy_index(name)),
        store(EmbeddingStore::load(fixture("embeddings_toy.txt"))),
        kb(ContextKB::load(fixture("kb/kb_single.tsv"), fixture("kb/kb_joint.tsv"),
                           testutil::toy_pipeline())),
        profiles(testutil::toy_profiles(name)) {}
};

}  // namespace

TEST_CASE("model names round-trip") {
  for (Model m : all_models()) {
    CHECK(model_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(model_from_string("neumf"), DataError);
}

TEST_CASE("model defaults carry the published optima") {
  FeedbackConfig frlm = model_defaults(Model::frlm, PsiMode::location);
  CHECK(frlm.fb_docs == 5);
  CHECK(frlm.fb_terms == 25);
  CHECK(frlm.gamma_h == 0.8);

  FeedbackConfig kderlm = model_defaults(Model::kderlm, PsiMode::location);
  CHECK(kderlm.fb_docs == 3);
  CHECK(kderlm.fb_terms == 80);

  FeedbackConfig kdefrlm_l = model_defaults(Model::kdefrlm, PsiMode::location);
  CHECK(kdefrlm_l.fb_docs == 2);
  CHECK(kdefrlm_l.fb_terms == 100);
  CHECK(kdefrlm_l.gamma_h == 0.6);
  CHECK(model_defaults(Model::kdefrlm, PsiMode::joint).gamma_h == 0.7);
  CHECK(model_defaults(Model::kdefrlm, PsiMode::single).gamma_h == 0.7);
}

TEST_CASE("every model honors the hard location constraint on the toys") {
  for (const std::string name : {"toy1", "toy3"}) {
    Stack s(name);
    FeedbackConfig cfg;
    cfg.fb_docs = 2;
    cfg.fb_terms = 6;
    Recommender rec(&s.index, &s.store, &s.kb, &s.profiles, cfg);
    for (const auto& profile : s.profiles) {
      for (Model m : all_models()) {
        INFO(name, " ", to_string(m), " ", profile.user_id);
        RankedList r = rec.run_user(profile, m);
        CHECK(!r.empty());
        for (const auto& e : r.entries) {
          CHECK(s.index.city_of(*s.index.doc_ord(e.doc_id)) == profile.location);
        }
      }
    }
  }
}

TEST_CASE("run_all produces one ranked list per user") {
  Stack s("toy3");
  FeedbackConfig cfg;
  cfg.fb_docs = 2;
  cfg.fb_terms = 6;
  Recommender rec(&s.index, &s.store, &s.kb, &s.profiles, cfg);

  Run run = rec.run_all(Model::frlm);
  CHECK(run.size() == 2);
  CHECK(run.count("u3") == 1);
  CHECK(run.count("u4") == 1);

  Run one = rec.run_all(Model::frlm, std::string("u4"));
  CHECK(one.size() == 1);
  CHECK_THROWS_AS(rec.run_all(Model::frlm, std::string("nobody")), DataError);
}

TEST_CASE("run tags pin the configuration") {
  FeedbackConfig a;
  FeedbackConfig b;
  b.gamma_h = 0.35;
  CHECK(run_tag(a, Model::frlm) != run_tag(b, Model::frlm));
  CHECK(run_tag(a, Model::frlm) != run_tag(a, Model::kdefrlm));
  CHECK(run_tag(a, Model::frlm) == run_tag(a, Model::frlm));
  CHECK(run_tag(a, Model::frlm).find("frlm-l-") == 0);
}

TEST_CASE("identical inputs produce byte-identical run output") {
  Stack s("toy1");
  FeedbackConfig cfg;
  cfg.fb_docs = 2;
  cfg.fb_terms = 6;
  Recommender rec(&s.index, &s.store, &s.kb, &s.profiles, cfg);

  auto render = [&](Model m) {
    std::ostringstream out;
    write_run(out, rec.run_all(m), run_tag(cfg, m));
    return out.str();
  };
  for (Model m : {Model::bm25, Model::frlm, Model::kdefrlm, Model::hybrid}) {
    CHECK(render(m) == render(m));
  }
}

TEST_CASE("library evaluate equals CLI-style evaluate on the same inputs") {
  Stack s("toy1");
  FeedbackConfig cfg;
  cfg.fb_docs = 2;
  cfg.fb_terms = 6;
  Recommender rec(&s.index, &s.store, &s.kb, &s.profiles, cfg);
  Run run = rec.run_all(Model::frlm);
  Qrels qrels = Qrels::load(fixture("toy1/qrels.txt"));

  MetricReport direct = evaluate(run, qrels);

  const std::string path = "rec_eval_tmp_run.txt";
  write_run(path, run, "t");
  MetricReport via_file = evaluate(read_run(path), qrels);
  std::remove(path.c_str());

  CHECK(direct.mean.ndcg5 == via_file.mean.ndcg5);
  CHECK(direct.mean.ap == via_file.mean.ap);
}
