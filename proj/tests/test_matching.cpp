#include <doctest.h>

#include <cmath>
#include <random>

#include "labeltree/error.hpp"
#include "labeltree/matching.hpp"
#include "support.hpp"

using namespace labeltree;
using namespace testing_support;

TEST_CASE("two identical rows") {
  Matrix m(2, 2);
  m(0, 0) = m(1, 0) = 0.6;
  m(0, 1) = m(1, 1) = 0.4;
  ProbabilityMatrixBundle b(LabelVocabulary({"a", "b"}), m, {{"0", {}, {}, {}}, {"1", {}, {}, {}}});
  const auto c = build_matching_matrix(b);
  CHECK(c(0, 0) == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(c(0, 1) == doctest::Approx(0.48).epsilon(1e-15));
  CHECK(c(1, 1) == doctest::Approx(0.32).epsilon(1e-15));
  CHECK(c(1, 0) == c(0, 1));
  CHECK(conditional_prob(c, "a", "b") == doctest::Approx(0.6));
  CHECK(conditional_prob(c, 1, 0) == doctest::Approx(0.4));
}

TEST_CASE("matching matrix equals the triple loop and is PSD") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 40, k = 2 + rng() % 9;
    const auto b = random_bundle(rng, n, k);
    const auto c = build_matching_matrix(b);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t d = 0; d < k; ++d) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += b.matrix()(i, a) * b.matrix()(i, d);
        CHECK(std::abs(c(a, d) - s) <= 1e-12);
        CHECK(c(a, d) == c(d, a));
      }
    }
    for (int r = 0; r < 5; ++r) {
      std::vector<double> x(k);
      for (auto& v : x) v = g(rng);
      double q = 0;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t d = 0; d < k; ++d) q += x[a] * c(a, d) * x[d];
      CHECK(q >= -1e-9);
    }
  }
}

TEST_CASE("conditionals normalize and zero mass is undefined") {
  std::mt19937_64 rng(5);
  const auto b = random_bundle(rng, 20, 6);
  const auto c = build_matching_matrix(b);
  for (std::size_t bcol = 0; bcol < c.size(); ++bcol) {
    if (c.mass(bcol) == 0) continue;
    double s = 0;
    for (std::size_t a = 0; a < c.size(); ++a) s += conditional_prob(c, a, bcol);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  Matrix m(1, 3);
  m(0, 0) = 0.5;
  ProbabilityMatrixBundle z(LabelVocabulary({"a", "b", "c"}), m, {{"0", {}, {}, {}}});
  const auto cz = build_matching_matrix(z);
  CHECK(cz.zero_mass_labels() == std::vector<std::string>{"b", "c"});
  CHECK_THROWS_AS(conditional_prob(cz, 0, 1), DomainError);
}

TEST_CASE("additive over disjoint instance sets") {
  std::mt19937_64 rng(9);
  const auto b1 = random_bundle(rng, 15, 5);
  const auto b2 = random_bundle(rng, 10, 5);
  Matrix joined(25, 5);
  std::vector<InstanceMeta> meta;
  for (std::size_t i = 0; i < 25; ++i) {
    for (std::size_t j = 0; j < 5; ++j) joined(i, j) = i < 15 ? b1.matrix()(i, j) : b2.matrix()(i - 15, j);
    meta.push_back({std::to_string(i), {}, {}, {}});
  }
  const auto c = build_matching_matrix(ProbabilityMatrixBundle(b1.vocabulary(), joined, meta));
  const auto c1 = build_matching_matrix(b1), c2 = build_matching_matrix(b2);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t d = 0; d < 5; ++d) CHECK(std::abs(c(a, d) - c1(a, d) - c2(a, d)) <= 1e-12);
}

TEST_CASE("threaded build agrees with the serial one") {
  std::mt19937_64 rng(3);
  const auto b = random_bundle(rng, 500, 12);
  const auto serial = build_matching_matrix(b, 1);
  for (unsigned t : {2u, 3u, 8u, 1000u}) {
    const auto par = build_matching_matrix(b, t);
    for (std::size_t a = 0; a < 12; ++a)
      for (std::size_t d = 0; d < 12; ++d) CHECK(std::abs(par(a, d) - serial(a, d)) <= 1e-12);
    CHECK(build_matching_matrix(b, t).values() == par.values());
  }
}

TEST_CASE("matching cache round-trips and rejects asymmetric input") {
  std::mt19937_64 rng(4);
  const auto b = random_bundle(rng, 10, 4);
  const auto c = build_matching_matrix(b);
  TempDir d;
  save_matching_matrix(c, d / "m.csv");
  CHECK(load_matching_matrix(d / "m.csv", b.vocabulary()).values() == c.values());
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(MatchingMatrix(LabelVocabulary({"a", "b"}), asym), DataError);
}
