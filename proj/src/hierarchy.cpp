#include "labeltree/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "labeltree/error.hpp"
#include "labeltree/io.hpp"

namespace labeltree {
namespace {

using ordered_json = nlohmann::ordered_json;

bool better_candidate(const CandidateEdge& x, const CandidateEdge& y) {
  if (x.confidence != y.confidence) return x.confidence > y.confidence;
  if (x.parent_mass != y.parent_mass) return x.parent_mass > y.parent_mass;
  return x.parent < y.parent;
}

ordered_json common_json(const std::vector<std::string>& nodes, const std::vector<std::string>& roots,
                         const std::vector<std::string>& excluded, const char* mode) {
  ordered_json doc;
  doc["mode"] = mode;
  doc["nodes"] = nodes;
  doc["edges"] = ordered_json::array();
  doc["roots"] = roots;
  doc["excluded_zero_mass"] = excluded;
  return doc;
}

}  // namespace

HierarchyForest::HierarchyForest(std::vector<std::string> nodes, std::vector<ForestEdge> edges,
                                 std::vector<std::string> excluded_zero_mass)
    : nodes_(std::move(nodes)), excluded_(std::move(excluded_zero_mass)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) throw DataError("duplicate forest node '" + nodes_[i] + "'");
  }
  for (auto& e : edges) {
    if (!index_.contains(e.child) || !index_.contains(e.parent)) {
      throw DataError("edge " + e.child + " -> " + e.parent + " references a node outside the forest");
    }
    if (e.child == e.parent) throw DataError("self-loop on '" + e.child + "'");
    const std::string child = e.child;
    if (!parent_of_.emplace(child, std::move(e)).second) {
      throw DataError("node '" + child + "' has more than one parent");
    }
  }
  // Walk up from every node; a walk longer than the node count is a cycle.
  for (const auto& start : nodes_) {
    std::size_t steps = 0;
    for (auto it = parent_of_.find(start); it != parent_of_.end(); it = parent_of_.find(it->second.parent)) {
      if (++steps > nodes_.size()) throw DataError("forest edges contain a cycle through '" + start + "'");
    }
  }
}

std::vector<ForestEdge> HierarchyForest::edges() const {
  std::vector<ForestEdge> out;
  out.reserve(parent_of_.size());
  for (const auto& n : nodes_) {
    if (auto it = parent_of_.find(n); it != parent_of_.end()) out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> HierarchyForest::roots() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    if (!parent_of_.contains(n)) out.push_back(n);
  }
  return out;
}

std::optional<std::string> HierarchyForest::parent(std::string_view label) const {
  auto it = parent_of_.find(std::string(label));
  if (it == parent_of_.end()) return std::nullopt;
  return it->second.parent;
}

std::vector<std::string> HierarchyForest::children(std::string_view label) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    auto it = parent_of_.find(n);
    if (it != parent_of_.end() && it->second.parent == label) out.push_back(n);
  }
  return out;
}

std::vector<CandidateEdge> infer_candidate_edges(const MatchingMatrix& c, double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("threshold must satisfy 0 < t < 1");
  const auto& labels = c.vocabulary().labels();
  std::vector<CandidateEdge> out;
  for (std::size_t a = 0; a < c.size(); ++a) {
    const double mass_a = c.mass(a);
    if (mass_a == 0.0) continue;
    for (std::size_t b = 0; b < c.size(); ++b) {
      const double mass_b = c.mass(b);
      if (a == b || mass_b == 0.0) continue;
      const double child_side = c(a, b) / mass_a;
      const double parent_side = c(a, b) / mass_b;
      if (child_side > t && parent_side < child_side) {
        out.push_back({labels[a], labels[b], child_side, mass_a, mass_b});
      }
    }
  }
  return out;
}

CandidateGraph build_candidate_graph(const MatchingMatrix& c, double t) {
  CandidateGraph g;
  for (std::size_t a = 0; a < c.size(); ++a) {
    (c.mass(a) > 0.0 ? g.nodes : g.excluded_zero_mass).push_back(c.vocabulary().labels()[a]);
  }
  g.edges = infer_candidate_edges(c, t);
  return g;
}

std::vector<std::string> topological_order(const std::vector<std::string>& nodes,
                                           const std::vector<std::pair<std::string, std::string>>& edges) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
  std::vector<std::vector<std::size_t>> out_edges(nodes.size());
  std::vector<std::size_t> indegree(nodes.size(), 0);
  for (const auto& [from, to] : edges) {
    auto f = index.find(from);
    auto t = index.find(to);
    if (f == index.end() || t == index.end()) throw InvariantError("edge endpoint is not a node: " + from + " -> " + to);
    out_edges[f->second].push_back(t->second);
    ++indegree[t->second];
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::vector<std::string> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(nodes[v]);
    for (std::size_t w : out_edges[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() != nodes.size()) throw InvariantError("candidate edges contain a directed cycle");
  return order;
}

HierarchyForest resolve_forest(std::span<const CandidateEdge> edges, std::vector<std::string> nodes,
                               std::vector<std::string> excluded_zero_mass) {
  if (nodes.empty()) {
    std::unordered_set<std::string> seen;
    for (const auto& e : edges) {
      if (seen.insert(e.child).second) nodes.push_back(e.child);
      if (seen.insert(e.parent).second) nodes.push_back(e.parent);
    }
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(edges.size());
  for (const auto& e : edges) pairs.emplace_back(e.child, e.parent);
  topological_order(nodes, pairs);

  std::unordered_map<std::string, const CandidateEdge*> best;
  for (const auto& e : edges) {
    auto [it, inserted] = best.try_emplace(e.child, &e);
    if (!inserted && better_candidate(e, *it->second)) it->second = &e;
  }
  std::vector<ForestEdge> chosen;
  chosen.reserve(best.size());
  for (const auto& n : nodes) {
    if (auto it = best.find(n); it != best.end()) {
      chosen.push_back({it->second->child, it->second->parent, it->second->confidence});
    }
  }
  try {
    return HierarchyForest(std::move(nodes), std::move(chosen), std::move(excluded_zero_mass));
  } catch (const DataError& e) {
    throw InvariantError(std::string("resolved forest is invalid: ") + e.what());
  }
}

HierarchyForest build_forest(const MatchingMatrix& c, double t) {
  auto graph = build_candidate_graph(c, t);
  return resolve_forest(graph.edges, std::move(graph.nodes), std::move(graph.excluded_zero_mass));
}

std::map<std::string, std::size_t> node_depths(const HierarchyForest& forest) {
  std::map<std::string, std::size_t> depth;
  std::vector<std::string> chain;
  for (const auto& start : forest.nodes()) {
    chain.clear();
    std::string cur = start;
    std::size_t base = 0;
    for (;;) {
      if (auto it = depth.find(cur); it != depth.end()) {
        base = it->second;
        break;
      }
      chain.push_back(cur);
      auto p = forest.parent(cur);
      if (!p) {
        base = 0;
        chain.pop_back();
        depth.emplace(cur, 0);
        break;
      }
      cur = *p;
    }
    // chain holds the unresolved nodes from `start` upward, ending just below
    // a node whose depth is `base`.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth.emplace(*it, ++base);
  }
  return depth;
}

std::size_t total_path_length(const HierarchyForest& forest) {
  std::size_t total = 0;
  for (const auto& [label, d] : node_depths(forest)) total += d;
  return total;
}

double average_depth(const HierarchyForest& forest) {
  if (forest.size() == 0) return 0.0;
  return static_cast<double>(total_path_length(forest)) / static_cast<double>(forest.size());
}

std::size_t edge_difference(const HierarchyForest& a, const HierarchyForest& b) {
  auto edge_set = [](const HierarchyForest& f) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& e : f.edges()) s.emplace(e.child, e.parent);
    return s;
  };
  const auto sa = edge_set(a);
  const auto sb = edge_set(b);
  std::size_t diff = 0;
  for (const auto& e : sa) diff += sb.contains(e) ? 0 : 1;
  for (const auto& e : sb) diff += sa.contains(e) ? 0 : 1;
  return diff;
}

std::map<std::pair<std::string, std::string>, std::size_t> hop_distances(const HierarchyForest& forest) {
  const auto& nodes = forest.nodes();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const auto& e : forest.edges()) {
    const auto c = index.at(e.child);
    const auto p = index.at(e.parent);
    adj[c].push_back(p);
    adj[p].push_back(c);
  }
  std::map<std::pair<std::string, std::string>, std::size_t> out;
  constexpr auto kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(nodes.size());
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto w : adj[v]) {
        if (dist[w] == kUnseen) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      if (t != s && dist[t] != kUnseen && nodes[s] < nodes[t]) out.emplace(std::make_pair(nodes[s], nodes[t]), dist[t]);
    }
  }
  return out;
}

std::string forest_to_json(const HierarchyForest& forest) {
  auto doc = common_json(forest.nodes(), forest.roots(), forest.excluded_zero_mass(), "tree");
  for (const auto& e : forest.edges()) {
    doc["edges"].push_back({{"child", e.child}, {"parent", e.parent}, {"confidence", e.confidence}});
  }
  return doc.dump(2) + "\n";
}

std::string candidate_graph_to_json(const CandidateGraph& graph) {
  std::set<std::string> has_parent;
  for (const auto& e : graph.edges) has_parent.insert(e.child);
  std::vector<std::string> roots;
  for (const auto& n : graph.nodes) {
    if (!has_parent.contains(n)) roots.push_back(n);
  }
  auto doc = common_json(graph.nodes, roots, graph.excluded_zero_mass, "dag");
  for (const auto& e : graph.edges) {
    doc["edges"].push_back({{"child", e.child}, {"parent", e.parent}, {"confidence", e.confidence}});
  }
  return doc.dump(2) + "\n";
}

HierarchyForest forest_from_json(std::string_view text, const std::string& source_name) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(source_name + ": JSON parse error: " + e.what());
  }
  try {
    auto nodes = doc.at("nodes").get<std::vector<std::string>>();
    std::vector<ForestEdge> edges;
    for (const auto& e : doc.at("edges")) {
      edges.push_back({e.at("child").get<std::string>(), e.at("parent").get<std::string>(),
                       e.value("confidence", 0.0)});
    }
    std::vector<std::string> excluded;
    if (doc.contains("excluded_zero_mass")) excluded = doc["excluded_zero_mass"].get<std::vector<std::string>>();
    return HierarchyForest(std::move(nodes), std::move(edges), std::move(excluded));
  } catch (const ordered_json::exception& e) {
    throw DataError(source_name + ": malformed forest: " + e.what());
  } catch (const DataError& e) {
    throw DataError(source_name + ": " + e.what());
  }
}

HierarchyForest load_forest(const std::string& path) { return forest_from_json(io::read_file(path), path); }

}  // namespace labeltree
