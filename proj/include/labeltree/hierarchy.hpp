#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labeltree/matching.hpp"

namespace labeltree {

inline constexpr double kDefaultThreshold = 0.3;

// Proposed child -> parent relation. `confidence` is the child-side
// conditional C[a][b] / mass[a], an estimate of P(parent | child).
struct CandidateEdge {
  std::string child;
  std::string parent;
  double confidence = 0.0;
  double child_mass = 0.0;
  double parent_mass = 0.0;
};

struct ForestEdge {
  std::string child;
  std::string parent;
  double confidence = 0.0;

  bool operator==(const ForestEdge&) const = default;
};

// Directed forest over labels: every node has at most one parent and every
// node reaches a root.
class HierarchyForest {
 public:
  HierarchyForest() = default;
  // Throws DataError if an edge endpoint is not a node, a node has two
  // parents, or the edges contain a cycle.
  HierarchyForest(std::vector<std::string> nodes, std::vector<ForestEdge> edges,
                  std::vector<std::string> excluded_zero_mass = {});

  const std::vector<std::string>& nodes() const { return nodes_; }
  // Ordered by the child's position in nodes().
  std::vector<ForestEdge> edges() const;
  std::vector<std::string> roots() const;
  const std::vector<std::string>& excluded_zero_mass() const { return excluded_; }

  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return parent_of_.size(); }
  bool contains(std::string_view label) const { return index_.contains(std::string(label)); }
  std::optional<std::string> parent(std::string_view label) const;
  std::vector<std::string> children(std::string_view label) const;

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, ForestEdge> parent_of_;
  std::vector<std::string> excluded_;
};

// Unresolved candidate structure (may give a node several parents).
struct CandidateGraph {
  std::vector<std::string> nodes;
  std::vector<CandidateEdge> edges;
  std::vector<std::string> excluded_zero_mass;
};

// Edge a -> b iff a != b, both masses > 0, C[a][b]/mass[a] > t and
// C[a][b]/mass[b] < C[a][b]/mass[a]. Requires 0 < t < 1. Output ordered by
// (child index, parent index).
std::vector<CandidateEdge> infer_candidate_edges(const MatchingMatrix& c, double t);
CandidateGraph build_candidate_graph(const MatchingMatrix& c, double t);

// Keeps, per child, the candidate with the largest confidence; ties go to the
// heavier parent, then the lexicographically smaller parent label. When
// `nodes` is empty the node set is the edge endpoints in order of appearance.
// A cycle among the candidates raises InvariantError.
HierarchyForest resolve_forest(std::span<const CandidateEdge> edges, std::vector<std::string> nodes = {},
                               std::vector<std::string> excluded_zero_mass = {});

// infer_candidate_edges + resolve_forest over every nonzero-mass label.
HierarchyForest build_forest(const MatchingMatrix& c, double t);

// Kahn's algorithm over child -> parent edges; the order lists children before
// their parents. Throws InvariantError on a cycle.
std::vector<std::string> topological_order(const std::vector<std::string>& nodes,
                                           const std::vector<std::pair<std::string, std::string>>& edges);

std::map<std::string, std::size_t> node_depths(const HierarchyForest& forest);
std::size_t total_path_length(const HierarchyForest& forest);
double average_depth(const HierarchyForest& forest);

// Size of the symmetric difference of the (child, parent) edge sets.
std::size_t edge_difference(const HierarchyForest& a, const HierarchyForest& b);

// Undirected hop counts for every unordered pair {x, y} (x < y) in the same
// tree. Pairs in different trees are absent.
std::map<std::pair<std::string, std::string>, std::size_t> hop_distances(const HierarchyForest& forest);

std::string forest_to_json(const HierarchyForest& forest);
std::string candidate_graph_to_json(const CandidateGraph& graph);
// Throws DataError for malformed input, including DAG-mode files where some
// node has more than one parent.
HierarchyForest forest_from_json(std::string_view text, const std::string& source_name = "<memory>");
HierarchyForest load_forest(const std::string& path);

}  // namespace labeltree
