#include "labeltree/synth.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "labeltree/error.hpp"

namespace labeltree {

std::vector<std::string> planted_leaves(const HierarchyForest& forest) {
  std::set<std::string> has_child;
  for (const auto& e : forest.edges()) has_child.insert(e.parent);
  std::vector<std::string> out;
  for (const auto& n : forest.nodes()) {
    if (!has_child.contains(n)) out.push_back(n);
  }
  return out;
}

HierarchyForest make_balanced_tree(std::size_t nodes, std::size_t depth) {
  if (nodes == 0) throw DomainError("planted tree needs at least one node");
  if (depth == 0 && nodes > 1) throw DomainError("depth 0 holds a single node");

  std::size_t branching = 1;
  if (nodes > 1) {
    for (branching = 1;; ++branching) {
      std::size_t capacity = 0, level = 1;
      for (std::size_t d = 0; d <= depth && capacity < nodes; ++d) {
        capacity += level;
        level *= branching;
      }
      if (capacity >= nodes) break;
    }
  }

  const std::size_t width = std::to_string(nodes - 1).size() < 2 ? 2 : std::to_string(nodes - 1).size();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < nodes; ++i) {
    std::string digits = std::to_string(i);
    labels.push_back("n" + std::string(width - digits.size(), '0') + digits);
  }
  std::vector<ForestEdge> edges;
  for (std::size_t i = 1; i < nodes; ++i) edges.push_back({labels[i], labels[(i - 1) / branching], 1.0});
  return HierarchyForest(std::move(labels), std::move(edges));
}

LabelVocabulary planted_vocabulary(const HierarchyForest& forest) {
  std::vector<LabelGroup> groups;
  std::unordered_map<std::string, std::size_t> group_of_top;
  for (const auto& root : forest.roots()) {
    groups.push_back({root, {}});
    for (const auto& child : forest.children(root)) {
      group_of_top.emplace(child, groups.size());
      groups.push_back({child, {}});
    }
  }
  std::unordered_map<std::string, std::size_t> root_group;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!forest.parent(groups[g].name)) root_group.emplace(groups[g].name, g);
  }
  for (const auto& n : forest.nodes()) {
    std::string cur = n;
    std::string below = n;
    for (auto p = forest.parent(cur); p; p = forest.parent(cur)) {
      below = cur;
      cur = *p;
    }
    const std::size_t g = cur == n ? root_group.at(n) : group_of_top.at(below);
    groups[g].members.push_back(n);
  }
  return LabelVocabulary(forest.nodes(), std::move(groups));
}

ProbabilityMatrixBundle generate_bundle(const PlantedModel& model, std::size_t instances) {
  if (instances == 0) throw DomainError("instance count must be >= 1");
  if (!(model.gamma > 0.0 && model.gamma < 1.0)) throw DomainError("gamma must lie strictly between 0 and 1");
  if (!(model.epsilon >= 0.0) || !std::isfinite(model.epsilon)) throw DomainError("epsilon must be >= 0");

  const auto& forest = model.truth;
  const auto leaves = planted_leaves(forest);
  std::vector<double> weights = model.leaf_weights;
  if (weights.empty()) weights.assign(leaves.size(), 1.0 / static_cast<double>(leaves.size()));
  if (weights.size() != leaves.size()) throw DomainError("one leaf weight per leaf required");
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("leaf weights must be >= 0");
  }
  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(weight_sum - 1.0) > 1e-9) throw DomainError("leaf weights must sum to 1");

  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

  auto vocab = planted_vocabulary(forest);
  const std::size_t k = vocab.size();

  // Score template per leaf: gamma^k on the leaf's ancestor chain.
  std::vector<std::vector<double>> leaf_scores;
  for (const auto& leaf : leaves) {
    std::vector<double> scores(k, 0.0);
    double s = 1.0;
    std::string cur = leaf;
    for (;;) {
      scores[vocab.require_index(cur)] = s;
      auto p = forest.parent(cur);
      if (!p) break;
      cur = *p;
      s *= model.gamma;
    }
    for (auto& v : scores) v += model.epsilon;
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    for (auto& v : scores) v /= total;
    leaf_scores.push_back(std::move(scores));
  }

  Matrix y(instances, k);
  std::vector<InstanceMeta> meta(instances);
  const std::size_t id_width = std::to_string(instances - 1).size();
  for (std::size_t i = 0; i < instances; ++i) {
    SplitMix64 rng(model.seed ^ static_cast<std::uint64_t>(i));
    const double u = rng.uniform();
    std::size_t leaf = leaves.size() - 1;
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
      if (u < cumulative[j]) {
        leaf = j;
        break;
      }
    }
    std::copy(leaf_scores[leaf].begin(), leaf_scores[leaf].end(), y.row(i).begin());
    const auto digits = std::to_string(i);
    meta[i].instance_id = "i" + std::string(id_width - digits.size(), '0') + digits;
    meta[i].truth_label = leaves[leaf];
  }
  return {std::move(vocab), std::move(y), std::move(meta)};
}

RecoveryScore recovery_score(const HierarchyForest& truth, const HierarchyForest& inferred) {
  std::set<std::pair<std::string, std::string>> t, g;
  for (const auto& e : truth.edges()) t.emplace(e.child, e.parent);
  for (const auto& e : inferred.edges()) g.emplace(e.child, e.parent);
  std::size_t hits = 0;
  for (const auto& e : g) hits += t.contains(e) ? 1 : 0;

  RecoveryScore s;
  s.precision = g.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(g.size());
  s.recall = t.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(t.size());
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace labeltree
