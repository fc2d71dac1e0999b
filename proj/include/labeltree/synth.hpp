#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "labeltree/bundle.hpp"
#include "labeltree/hierarchy.hpp"

namespace labeltree {

// SplitMix64 (Steele, Lea, Flood). Part of the synthetic-data contract: the
// same seed gives the same stream in any implementation of this algorithm.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct PlantedModel {
  HierarchyForest truth;
  // Aligned with planted_leaves(truth); must sum to 1. Empty means uniform.
  std::vector<double> leaf_weights;
  double gamma = 0.5;   // per-level decay of ancestor scores, in (0, 1)
  double epsilon = 0.0; // uniform floor added to every label, >= 0
  std::uint64_t seed = 0;
};

// Nodes without children, in node order.
std::vector<std::string> planted_leaves(const HierarchyForest& forest);

// Single tree of `nodes` labels ("n00", "n01", ...) laid out as a b-ary heap
// with the smallest branching factor b that fits all nodes within `depth`
// levels below the root. nodes = 15, depth = 3 gives the full binary tree.
HierarchyForest make_balanced_tree(std::size_t nodes, std::size_t depth);

// Vocabulary over the planted nodes whose groups are the depth-1 subtrees,
// with every root as a singleton group.
LabelVocabulary planted_vocabulary(const HierarchyForest& forest);

// Instance i draws u from SplitMix64(seed ^ i) and picks the first leaf whose
// cumulative weight exceeds u. The leaf and each ancestor k levels above it
// score gamma^k, every label gets + epsilon, and the row is normalized to sum
// to 1. The leaf is recorded as the instance's truth label.
ProbabilityMatrixBundle generate_bundle(const PlantedModel& model, std::size_t instances);

struct RecoveryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Over directed (child, parent) edge sets. An empty inferred set has
// precision 1; an empty truth set has recall 1.
RecoveryScore recovery_score(const HierarchyForest& truth, const HierarchyForest& inferred);

}  // namespace labeltree
