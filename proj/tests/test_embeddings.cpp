#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "poirec/embeddings.hpp"
#include "poirec/errors.hpp"
#include "test_util.hpp"

using namespace poirec;
using testutil::check_close;

TEST_CASE("load_embeddings normalizes and validates") {
  EmbeddingStore store = EmbeddingStore::load(testutil::fixture("embeddings_toy.txt"));
  CHECK(store.dim() == 6);
  CHECK(store.size() == 10);
  for (const char* w : {"ale", "brew", "pub", "stout", "stout-pub", "gallery", "paint",
                        "museum", "park", "tree"}) {
    REQUIRE(store.contains(w));
    double norm2 = 0.0;
    for (double v : store.vector(w)) norm2 += v * v;
    check_close(norm2, 1.0, 1e-12);
  }
}

TEST_CASE("vector (3,4,0) is stored as (0.6,0.8,0)") {
  EmbeddingStore store(3);
  store.insert("w", {3.0, 4.0, 0.0});
  auto v = store.vector("w");
  check_close(v[0], 0.6, 1e-12);
  check_close(v[1], 0.8, 1e-12);
  check_close(v[2], 0.0, 1e-12);
}

TEST_CASE("malformed embedding files are rejected with line numbers") {
  auto write = [](const std::string& content) {
    std::string path = "embed_bad_tmp.txt";
    std::ofstream out(path);
    out << content;
    return path;
  };
  std::string p = write("2 3\na 1 0 0\nb 1 0\n");
  try {
    EmbeddingStore::load(p);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  std::remove(p.c_str());

  p = write("2 3\na 1 0 0\na 0 1 0\n");
  CHECK_THROWS_WITH_AS(EmbeddingStore::load(p), doctest::Contains("duplicate"), DataError);
  std::remove(p.c_str());

  p = write("3 3\na 1 0 0\nb 0 1 0\n");  // count mismatch
  CHECK_THROWS_AS(EmbeddingStore::load(p), DataError);
  std::remove(p.c_str());
}

TEST_CASE("cosine identities") {
  EmbeddingStore store(3);
  store.insert("x", {1, 0, 0});
  store.insert("y", {0, 2, 0});
  store.insert("negx", {-5, 0, 0});

  check_close(*cosine(store, "x", "x"), 1.0, 1e-12);
  check_close(*cosine(store, "x", "y"), 0.0, 1e-12);
  check_close(*cosine(store, "x", "negx"), -1.0, 1e-12);
  CHECK(!cosine(store, "x", "missing").has_value());
}

TEST_CASE("gaussian kernel analytic values") {
  EmbeddingStore store(3);
  store.insert("x", {1, 0, 0});
  store.insert("y", {0, 1, 0});

  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  KernelConfig cfg;  // h=1, sigma=1

  // zero distance
  check_close(*gaussian_kernel(store, "x", "x", cfg), inv_sqrt_2pi, 1e-12);
  // orthogonal unit vectors: |x-y|^2 = 2 -> exp(-1)/sqrt(2pi)
  check_close(*gaussian_kernel(store, "x", "y", cfg), inv_sqrt_2pi * std::exp(-1.0), 1e-9);
  CHECK(*gaussian_kernel(store, "x", "y", cfg) == doctest::Approx(0.146763).epsilon(1e-5));

  // huge bandwidth flattens the kernel
  KernelConfig wide{1e6, 1.0};
  check_close(*gaussian_kernel(store, "x", "y", wide), inv_sqrt_2pi, 1e-9);
}

TEST_CASE("kernel oracle values on the toy embedding") {
  EmbeddingStore store = EmbeddingStore::load(testutil::fixture("embeddings_toy.txt"));
  auto want = testutil::load_json("expected/embed_expected.json");

  check_close(*cosine(store, "ale", "brew"), want["cosine"]["ale_brew"].get<double>());
  check_close(*cosine(store, "ale", "museum"), want["cosine"]["ale_museum"].get<double>());
  check_close(*cosine(store, "park", "tree"), want["cosine"]["park_tree"].get<double>());
  check_close(*cosine(store, "pub", "stout-pub"),
              want["cosine"]["pub_stout-pub"].get<double>());

  KernelConfig h1;
  check_close(*gaussian_kernel(store, "ale", "brew", h1),
              want["kernel_h1"]["ale_brew"].get<double>());
  check_close(*gaussian_kernel(store, "ale", "museum", h1),
              want["kernel_h1"]["ale_museum"].get<double>());
  KernelConfig h05{0.5, 1.0};
  check_close(*gaussian_kernel(store, "ale", "brew", h05),
              want["kernel_h05"]["ale_brew"].get<double>());
  check_close(*gaussian_kernel(store, "gallery", "tree", h05),
              want["kernel_h05"]["gallery_tree"].get<double>());
}

TEST_CASE("kernel is symmetric and monotone in distance (fuzz)") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  EmbeddingStore store(8);
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = g(rng);
    words.push_back("w" + std::to_string(i));
    store.insert(words.back(), v);
  }
  KernelConfig cfg{0.8, 1.0};
  for (int i = 0; i < 200; ++i) {
    const auto& a = words[rng() % words.size()];
    const auto& b = words[rng() % words.size()];
    const auto& c = words[rng() % words.size()];
    check_close(*gaussian_kernel(store, a, b, cfg), *gaussian_kernel(store, b, a, cfg), 1e-15);
    // closer pair (higher cosine) gets the larger kernel value
    double cos_ab = *cosine(store, a, b), cos_ac = *cosine(store, a, c);
    double k_ab = *gaussian_kernel(store, a, b, cfg), k_ac = *gaussian_kernel(store, a, c, cfg);
    if (cos_ab > cos_ac) CHECK(k_ab >= k_ac);
  }
}

TEST_CASE("max_sim clamps, skips OOV seeds, and is monotone in the seed set") {
  EmbeddingStore store = EmbeddingStore::load(testutil::fixture("embeddings_toy.txt"));
  auto want = testutil::load_json("expected/embed_expected.json")["max_sim_drinks"];

  std::vector<std::string> seeds = {"ale", "stout", "pub"};
  for (const auto& [w, v] : want.items()) {
    check_close(max_sim(store, w, seeds).value, v.get<double>());
  }

  // self-membership gives exactly 1
  CHECK(max_sim(store, "ale", seeds).value == 1.0);

  // OOV word and all-OOV seeds are neutral with the flag set
  auto r1 = max_sim(store, "nowhere", seeds);
  CHECK(r1.value == 1.0);
  CHECK(r1.oov);
  std::vector<std::string> ghost = {"gone1", "gone2"};
  auto r2 = max_sim(store, "ale", ghost);
  CHECK(r2.value == 1.0);
  CHECK(r2.oov);

  // monotone: growing the seed set never lowers the value
  std::vector<std::string> small = {"ale"};
  std::vector<std::string> big = {"ale", "stout", "pub", "museum"};
  for (const char* w : {"brew", "tree", "gallery", "paint"}) {
    CHECK(max_sim(store, w, small).value <= max_sim(store, w, big).value + 1e-15);
  }

  // all-negative cosines clamp to zero
  EmbeddingStore tiny(2);
  tiny.insert("a", {1, 0});
  tiny.insert("b", {-1, 0.0001});
  CHECK(max_sim(tiny, "a", std::vector<std::string>{"b"}).value == 0.0);
}
