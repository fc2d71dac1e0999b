#include <doctest.h>

#include <random>

#include "labeltree/bias.hpp"
#include "labeltree/error.hpp"
#include "support.hpp"

using namespace labeltree;
using namespace testing_support;

namespace {

LabelVocabulary fine_vocab() {
  return LabelVocabulary({"joy", "glee", "fear", "panic", "rage"},
                         {{"happy", {"joy", "glee"}}, {"fear", {"fear", "panic"}}, {"anger", {"rage"}}});
}

}  // namespace

TEST_CASE("argmax with ties to the lower column") {
  Matrix m(3, 3);
  m(0, 1) = 0.4, m(0, 2) = 0.4;
  m(1, 0) = 0.9;
  m(2, 2) = 0.1;
  ProbabilityMatrixBundle b(LabelVocabulary({"a", "b", "c"}), m,
                            {{"0", "a", {}, {}}, {"1", "a", {}, {}}, {"2", "b", {}, {}}});
  CHECK(predict_labels(b) == std::vector<std::string>{"b", "a", "c"});
  Matrix z(1, 2);
  ProbabilityMatrixBundle bz(LabelVocabulary({"a", "b"}), z, {{"0", {}, {}, {}}});
  CHECK_THROWS_AS(predict_labels(bz), DomainError);
  CHECK_THROWS_AS(truth_labels(bz), DataError);
}

TEST_CASE("confusion, coarsening and flow") {
  const auto v = fine_vocab();
  const auto map = CoarseMap::from_groups(v);
  CHECK(map.category_sizes() == std::vector<std::size_t>{2, 2, 1});
  const std::vector<std::string> truth = {"joy", "glee", "fear", "panic", "rage", "rage"};
  const std::vector<std::string> pred = {"glee", "glee", "rage", "fear", "rage", "panic"};
  const auto fine = confusion(pred, truth, v);
  CHECK(fine.total() == 6);
  CHECK(fine.at(fine.index_of("joy"), fine.index_of("glee")) == 1);
  CHECK(accuracy(fine) == doctest::Approx(2.0 / 6.0));
  const auto coarse = coarsen(fine, map);
  CHECK(coarse.labels() == std::vector<std::string>{"happy", "fear", "anger"});
  CHECK(accuracy(coarse) == doctest::Approx(4.0 / 6.0));
  CHECK(coarse == confusion(coarsen_labels(pred, map), coarsen_labels(truth, map),
                            LabelVocabulary(map.categories())));

  const auto flow = flow_into(coarse, "anger");
  CHECK(flow.target == "anger");
  REQUIRE(flow.proportions.size() == 3);
  CHECK(flow.proportions[1].first == "fear");
  CHECK(flow.proportions[1].second == doctest::Approx(1.0 / 6.0));
  CHECK(flow.proportions[2].second == doctest::Approx(1.0 / 6.0));
  CHECK(flow.accuracy_within_target == doctest::Approx(0.5));
  CHECK(flow_into(coarse, "happy").accuracy_within_target == 1.0);

  CHECK(prediction_difference(pred, truth) == 4);
  CHECK_THROWS(prediction_difference({"a"}, {"a", "b"}));
  CHECK_THROWS_AS(CoarseMap::from_groups(LabelVocabulary({"a", "b"}, {{"g", {"a"}}})), DataError);
}

TEST_CASE("coarse accuracy never falls below fine accuracy") {
  const auto v = fine_vocab();
  const auto map = CoarseMap::from_groups(v);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> t, p;
    const std::size_t n = 1 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(v.labels()[rng() % v.size()]);
      p.push_back(v.labels()[rng() % v.size()]);
    }
    const auto fine = confusion(p, t, v);
    const auto coarse = coarsen(fine, map);
    CHECK(accuracy(coarse) >= accuracy(fine));
    CHECK(coarse.total() == fine.total());
    CHECK(coarse == confusion(coarsen_labels(p, map), coarsen_labels(t, map), LabelVocabulary(map.categories())));
  }
}

TEST_CASE("geometry-accuracy correlation") {
  std::vector<HierarchyForest> forests;
  std::mt19937_64 rng(1);
  for (std::size_t k : {3u, 5u, 8u, 12u}) {
    std::vector<ForestEdge> chain;
    auto labels = make_labels(k);
    for (std::size_t i = 1; i < k; ++i) chain.push_back({labels[i], labels[i - 1], 1});
    forests.emplace_back(labels, chain);
  }
  const auto r = geometry_accuracy_correlation(forests, {0.1, 0.2, 0.3, 0.4}, parse_geometry_metric("total_path_length"));
  CHECK(r.r > 0.9);
  CHECK_THROWS_AS(geometry_accuracy_correlation({forests[0], forests[1]}, {0.1, 0.2}, GeometryMetric::average_depth),
                  DomainError);
}

TEST_CASE("personas in first-appearance order") {
  Matrix m(3, 2, 0.5);
  ProbabilityMatrixBundle b(LabelVocabulary({"a", "b"}), m,
                            {{"0", {}, "kid", {}}, {"1", {}, {}, {}}, {"2", {}, "kid", {}}});
  const auto p = personas(b);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == std::optional<std::string>("kid"));
  CHECK(p[1] == std::nullopt);
}
