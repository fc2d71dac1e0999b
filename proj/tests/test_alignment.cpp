#include <doctest.h>

#include <cmath>
#include <random>

#include "labeltree/alignment.hpp"
#include "labeltree/error.hpp"
#include "support.hpp"

using namespace labeltree;
using namespace testing_support;

namespace {

LabelVocabulary two_groups() {
  return LabelVocabulary({"joy", "glee", "bliss", "fear", "panic"},
                         {{"happy", {"joy", "glee", "bliss"}}, {"scared", {"fear", "panic"}}});
}

}  // namespace

TEST_CASE("pearson on a fixed pair") {
  const auto r = pearson(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 1, 4, 3, 6});
  CHECK(r.r == doctest::Approx(0.8219949365267865).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.08770664700806553).epsilon(1e-9));
  CHECK(r.n == 5);
}

TEST_CASE("pearson identities and domain errors") {
  const std::vector<double> x{0.3, 1.7, 2.2, 9.0, -4.0, 3.3};
  CHECK(pearson(x, x).r == 1.0);
  std::vector<double> neg;
  for (double v : x) neg.push_back(-2.0 * v + 7.0);
  CHECK(pearson(x, neg).r == doctest::Approx(-1.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> a(10), b(10), c(10);
    for (std::size_t j = 0; j < 10; ++j) a[j] = g(rng), b[j] = g(rng);
    const double scale = 0.5 + std::abs(g(rng)), shift = g(rng);
    for (std::size_t j = 0; j < 10; ++j) c[j] = scale * a[j] + shift;
    CHECK(pearson(c, b).r == doctest::Approx(pearson(a, b).r).epsilon(1e-12));
    CHECK(pearson(a, b).r == doctest::Approx(pearson(b, a).r).epsilon(1e-15));
    CHECK(std::abs(pearson(a, b).r) <= 1.0);
  }
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DomainError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("forest whose clusters equal the groups aligns perfectly") {
  const auto v = two_groups();
  HierarchyForest f({"joy", "glee", "bliss", "fear", "panic", "emotion"},
                    {{"joy", "emotion", 1}, {"glee", "joy", 1}, {"bliss", "joy", 1}, {"fear", "emotion", 1},
                     {"panic", "fear", 1}});
  const std::vector<std::string> labels = {"joy", "glee", "bliss", "fear", "panic"};
  const auto gv = group_distance_vector(v, labels);
  const auto tv = tree_cluster_distance_vector(f, labels);
  CHECK(gv.pairs.size() == 10);
  CHECK(gv.values == tv.values);
  const auto r = pearson(gv, tv);
  CHECK(r.r == 1.0);
  CHECK(r.n == 10);
  CHECK(r.excluded_pairs == 0);
}

TEST_CASE("hop distances drop cross-tree pairs") {
  HierarchyForest f({"a", "b", "c", "d", "e"}, {{"b", "a", 1}, {"c", "a", 1}, {"e", "d", 1}});
  const auto hv = hop_distance_vector(f, {"a", "b", "c", "d", "e"});
  CHECK(hv.values.size() == 4);
  CHECK(hv.excluded_pairs == 6);
  const auto gv = group_distance_vector(LabelVocabulary({"a", "b", "c", "d", "e"}, {{"x", {"a", "b"}}, {"y", {"c", "d", "e"}}}),
                                        {"a", "b", "c", "d", "e"});
  const auto r = pearson(gv, hv);
  CHECK(r.n == 4);
  CHECK(r.excluded_pairs == 6);
}

TEST_CASE("wheel position distance wraps around") {
  LabelVocabulary v({"a", "b", "c", "d"}, {{"g0", {"a"}}, {"g1", {"b"}}, {"g2", {"c"}}, {"g3", {"d"}}});
  const auto w = wheel_position_distance_vector(v, {"a", "b", "c", "d"});
  // pairs sorted: (a,b) (a,c) (a,d) (b,c) (b,d) (c,d)
  CHECK(w.values == std::vector<double>{1, 2, 1, 1, 2, 1});
}

namespace {

// Brute-force reference: recompute all cluster distances from leaf sets at each
// step (no Lance-Williams recurrence).
std::vector<Merge> naive_linkage(const Matrix& y, Linkage link) {
  const std::size_t k = y.cols();
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < k; ++i) members.push_back({i}), ids.push_back(i);
  std::vector<Merge> out;
  while (members.size() > 1) {
    double best = INFINITY;
    std::size_t bi = 0, bj = 0;
    std::pair<std::size_t, std::size_t> best_key{k, k};
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        double agg = link == Linkage::single ? INFINITY : link == Linkage::complete ? -INFINITY : 0.0;
        for (auto a : members[i])
          for (auto b : members[j]) {
            const double d = cosine_distance(y, a, b);
            if (link == Linkage::single) agg = std::min(agg, d);
            else if (link == Linkage::complete) agg = std::max(agg, d);
            else agg += d;
          }
        if (link == Linkage::average) agg /= static_cast<double>(members[i].size() * members[j].size());
        const std::pair<std::size_t, std::size_t> key = std::minmax(members[i][0], members[j][0]);
        if (agg < best - 1e-12 || (std::abs(agg - best) <= 1e-12 && key < best_key)) {
          best = agg, bi = i, bj = j, best_key = key;
        }
      }
    }
    out.push_back({std::min(ids[bi], ids[bj]), std::max(ids[bi], ids[bj]), best, members[bi].size() + members[bj].size()});
    auto merged = members[bi];
    merged.insert(merged.end(), members[bj].begin(), members[bj].end());
    std::sort(merged.begin(), merged.end());
    members.erase(members.begin() + static_cast<long>(bj));
    ids.erase(ids.begin() + static_cast<long>(bj));
    members[bi] = merged;
    ids[bi] = k + out.size() - 1;
  }
  return out;
}

}  // namespace

TEST_CASE("agglomerative baseline matches a brute-force reference") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng() % 6, k = 2 + rng() % 6;
    Matrix m(n, k);
    std::vector<InstanceMeta> meta;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) m(i, j) = u(rng) / static_cast<double>(k);
      meta.push_back({std::to_string(i), {}, {}, {}});
    }
    ProbabilityMatrixBundle b(LabelVocabulary(make_labels(k)), m, meta);
    for (auto link : {Linkage::single, Linkage::average, Linkage::complete}) {
      const auto got = agglomerative_baseline(b, link);
      const auto want = naive_linkage(m, link);
      REQUIRE(got.merges.size() == want.size());
      for (std::size_t s = 0; s < want.size(); ++s) {
        CHECK(got.merges[s].left == want[s].left);
        CHECK(got.merges[s].right == want[s].right);
        CHECK(got.merges[s].height == doctest::Approx(want[s].height).epsilon(1e-10));
        CHECK(got.merges[s].size == want[s].size);
      }
    }
  }
}

TEST_CASE("agglomerative baseline skips zero columns") {
  Matrix m(2, 3);
  m(0, 0) = 0.5, m(1, 0) = 0.1, m(0, 1) = 0.2, m(1, 1) = 0.4;
  ProbabilityMatrixBundle b(LabelVocabulary({"a", "b", "c"}), m, {{"0", {}, {}, {}}, {"1", {}, {}, {}}});
  const auto d = agglomerative_baseline(b, parse_linkage("average"));
  CHECK(d.labels == std::vector<std::string>{"a", "b"});
  CHECK(d.excluded == std::vector<std::string>{"c"});
  CHECK(d.merges.size() == 1);
  CHECK(d.to_json().find("\"tree\"") != std::string::npos);
  CHECK_THROWS_AS(parse_linkage("ward"), DomainError);
}
