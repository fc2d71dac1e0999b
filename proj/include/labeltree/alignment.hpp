#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "labeltree/bundle.hpp"
#include "labeltree/hierarchy.hpp"
#include "labeltree/vocabulary.hpp"

namespace labeltree {

// Values over unordered label pairs (first < second), sorted by pair.
struct PairwiseDistanceVector {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> values;
  // Pairs of the requested subset that had no defined distance.
  std::size_t excluded_pairs = 0;
};

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t excluded_pairs = 0;

  std::string to_json() const;
};

// 0 if both labels share a vocabulary group, else 1. Every label must be
// grouped.
PairwiseDistanceVector group_distance_vector(const LabelVocabulary& vocab, const std::vector<std::string>& labels);

// Circular distance between group positions (groups in vocabulary order laid
// around a wheel): min(|i - j|, G - |i - j|). Optional ordinal variant of
// group_distance_vector.
PairwiseDistanceVector wheel_position_distance_vector(const LabelVocabulary& vocab,
                                                      const std::vector<std::string>& labels);

// Cluster of a node: the depth-1 ancestor-or-self it descends from; each root
// is a singleton cluster. 0 if two labels share a cluster, else 1.
PairwiseDistanceVector tree_cluster_distance_vector(const HierarchyForest& forest,
                                                    const std::vector<std::string>& labels);

// Hop counts within a tree; cross-tree pairs are dropped and counted in
// excluded_pairs.
PairwiseDistanceVector hop_distance_vector(const HierarchyForest& forest, const std::vector<std::string>& labels);

// Pearson correlation over the pairs present in both vectors, with a two-sided
// p-value from Student's t with n - 2 degrees of freedom. Throws DomainError
// when fewer than 3 pairs remain or either side is constant.
CorrelationResult pearson(const PairwiseDistanceVector& x, const PairwiseDistanceVector& y);
CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

enum class Linkage { single, average, complete };
Linkage parse_linkage(const std::string& name);

struct Merge {
  std::size_t left = 0;   // cluster ids: leaves are 0..L-1, merge i creates L+i
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<std::string> labels;    // leaves, in vocabulary order
  std::vector<Merge> merges;          // L - 1 merges
  std::vector<std::string> excluded;  // zero-norm columns

  std::string to_json() const;
};

// Cosine distance between label profiles (columns of Y), for a pair of
// columns with norms > 0.
double cosine_distance(const Matrix& y, std::size_t a, std::size_t b);

// Agglomerative clustering of the columns of Y under cosine distance.
// Minimum-distance pair merges first; ties go to the pair whose smallest
// member label indices compare lower. Zero-norm columns are excluded.
Dendrogram agglomerative_baseline(const ProbabilityMatrixBundle& bundle, Linkage linkage);

}  // namespace labeltree
