#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "labeltree/bundle.hpp"
#include "labeltree/hierarchy.hpp"
#include "labeltree/matching.hpp"

namespace testing_support {

using namespace labeltree;

inline std::vector<std::string> make_labels(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("l" + std::to_string(i));
  return out;
}

// Random bundle with sparse rows that sum to at most 1.
inline ProbabilityMatrixBundle random_bundle(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (u(rng) < 0.5) {
        m(i, j) = u(rng);
        sum += m(i, j);
      }
    }
    const double scale = sum > 0.0 ? u(rng) / sum : 0.0;
    for (std::size_t j = 0; j < k; ++j) m(i, j) *= scale;
  }
  std::vector<InstanceMeta> meta;
  for (std::size_t i = 0; i < n; ++i) meta.push_back({"i" + std::to_string(i), std::nullopt, std::nullopt, std::nullopt});
  return ProbabilityMatrixBundle(LabelVocabulary(make_labels(k)), std::move(m), std::move(meta));
}

inline MatchingMatrix random_matching(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double v = u(rng) < 0.3 ? 0.0 : u(rng);
      m(a, b) = m(b, a) = v;
    }
  }
  return MatchingMatrix(LabelVocabulary(make_labels(k)), std::move(m));
}

// Random forest: node i picks a parent among earlier nodes or stays a root.
inline HierarchyForest random_forest(std::mt19937_64& rng, std::size_t k) {
  auto labels = make_labels(k);
  std::vector<ForestEdge> edges;
  for (std::size_t i = 1; i < k; ++i) {
    if (rng() % 4 == 0) continue;
    edges.push_back({labels[i], labels[rng() % i], 0.5});
  }
  return HierarchyForest(labels, edges);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("labeltree-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
