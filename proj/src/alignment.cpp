#include "labeltree/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "labeltree/error.hpp"

namespace labeltree {
namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> sorted_unique(const std::vector<std::string>& labels) {
  std::vector<std::string> out = labels;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Distance>
PairwiseDistanceVector build_pairs(const std::vector<std::string>& labels, Distance&& distance) {
  const auto sorted = sorted_unique(labels);
  PairwiseDistanceVector out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (auto d = distance(sorted[i], sorted[j])) {
        out.pairs.emplace_back(sorted[i], sorted[j]);
        out.values.push_back(*d);
      } else {
        ++out.excluded_pairs;
      }
    }
  }
  return out;
}

std::vector<std::size_t> group_indices(const LabelVocabulary& vocab, const std::vector<std::string>& labels) {
  if (!vocab.has_groups()) throw DomainError("vocabulary has no groups");
  std::vector<std::size_t> out;
  for (const auto& l : labels) {
    auto g = vocab.group_of(l);
    if (!g) throw DomainError("label '" + l + "' is not in any vocabulary group");
    out.push_back(*g);
  }
  return out;
}

void require_nodes(const HierarchyForest& forest, const std::vector<std::string>& labels) {
  for (const auto& l : labels) {
    if (!forest.contains(l)) throw DomainError("label '" + l + "' is not a node of the forest");
  }
}

}  // namespace

std::string CorrelationResult::to_json() const {
  ordered_json doc;
  doc["r"] = r;
  doc["p"] = p_value;
  doc["n"] = n;
  doc["excluded_pairs"] = excluded_pairs;
  return doc.dump(2) + "\n";
}

PairwiseDistanceVector group_distance_vector(const LabelVocabulary& vocab, const std::vector<std::string>& labels) {
  group_indices(vocab, labels);
  return build_pairs(labels, [&](const std::string& a, const std::string& b) -> std::optional<double> {
    return *vocab.group_of(a) == *vocab.group_of(b) ? 0.0 : 1.0;
  });
}

PairwiseDistanceVector wheel_position_distance_vector(const LabelVocabulary& vocab,
                                                      const std::vector<std::string>& labels) {
  group_indices(vocab, labels);
  const auto groups = static_cast<long>(vocab.groups().size());
  return build_pairs(labels, [&](const std::string& a, const std::string& b) -> std::optional<double> {
    const long gap = std::labs(static_cast<long>(*vocab.group_of(a)) - static_cast<long>(*vocab.group_of(b)));
    return static_cast<double>(std::min(gap, groups - gap));
  });
}

PairwiseDistanceVector tree_cluster_distance_vector(const HierarchyForest& forest,
                                                    const std::vector<std::string>& labels) {
  require_nodes(forest, labels);
  std::map<std::string, std::string> cluster;
  for (const auto& l : sorted_unique(labels)) {
    std::string cur = l;
    std::string below = l;  // last node visited before reaching the root
    for (auto p = forest.parent(cur); p; p = forest.parent(cur)) {
      below = cur;
      cur = *p;
    }
    // cur is the root. A root is its own cluster; anything else belongs to the
    // depth-1 node on its path.
    cluster[l] = (cur == l) ? "root:" + l : "sub:" + below;
  }
  return build_pairs(labels, [&](const std::string& a, const std::string& b) -> std::optional<double> {
    return cluster.at(a) == cluster.at(b) ? 0.0 : 1.0;
  });
}

PairwiseDistanceVector hop_distance_vector(const HierarchyForest& forest, const std::vector<std::string>& labels) {
  require_nodes(forest, labels);
  const auto hops = hop_distances(forest);
  return build_pairs(labels, [&](const std::string& a, const std::string& b) -> std::optional<double> {
    auto it = hops.find({a, b});
    if (it == hops.end()) return std::nullopt;
    return static_cast<double>(it->second);
  });
}

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("pearson: vectors differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("pearson: at least 3 pairs required, got " + std::to_string(n));

  long double mx = 0.0L, my = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<long double>(n);
  my /= static_cast<long double>(n);
  long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dx = x[i] - mx;
    const long double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) throw DomainError("pearson: correlation undefined for a constant vector");

  // sqrt(s * s) == s exactly, so identical inputs give r == 1 exactly.
  double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  r = std::clamp(r, -1.0, 1.0);

  CorrelationResult out;
  out.r = r;
  out.n = n;
  if (std::abs(r) == 1.0) {
    out.p_value = 0.0;
  } else {
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    out.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
  }
  return out;
}

CorrelationResult pearson(const PairwiseDistanceVector& x, const PairwiseDistanceVector& y) {
  std::map<std::pair<std::string, std::string>, double> ys;
  for (std::size_t i = 0; i < y.pairs.size(); ++i) ys.emplace(y.pairs[i], y.values[i]);
  std::vector<double> xv, yv;
  for (std::size_t i = 0; i < x.pairs.size(); ++i) {
    if (auto it = ys.find(x.pairs[i]); it != ys.end()) {
      xv.push_back(x.values[i]);
      yv.push_back(it->second);
    }
  }
  const std::size_t shared = xv.size();
  auto out = pearson(xv, yv);
  // Both sides normally cover the same label subset, so a pair missing from
  // one side is already in that side's own excluded count.
  const std::size_t requested =
      std::max(x.pairs.size() + x.excluded_pairs, y.pairs.size() + y.excluded_pairs);
  out.excluded_pairs = requested - shared;
  return out;
}

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::single;
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  throw DomainError("unknown linkage '" + name + "' (expected single, average or complete)");
}

double cosine_distance(const Matrix& y, std::size_t a, std::size_t b) {
  long double dot = 0.0L, na = 0.0L, nb = 0.0L;
  for (std::size_t n = 0; n < y.rows(); ++n) {
    const long double ya = y(n, a);
    const long double yb = y(n, b);
    dot += ya * yb;
    na += ya * ya;
    nb += yb * yb;
  }
  if (na == 0.0L || nb == 0.0L) throw DomainError("cosine distance undefined for a zero column");
  const long double cosine = dot / std::sqrt(na * nb);
  return std::clamp(static_cast<double>(1.0L - cosine), 0.0, 2.0);
}

Dendrogram agglomerative_baseline(const ProbabilityMatrixBundle& bundle, Linkage linkage) {
  const Matrix& y = bundle.matrix();
  const auto& vocab = bundle.vocabulary();
  Dendrogram out;
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < y.cols(); ++c) {
    bool nonzero = false;
    for (std::size_t n = 0; n < y.rows() && !nonzero; ++n) nonzero = y(n, c) != 0.0;
    if (nonzero) {
      columns.push_back(c);
      out.labels.push_back(vocab.labels()[c]);
    } else {
      out.excluded.push_back(vocab.labels()[c]);
    }
  }
  const std::size_t leaves = columns.size();
  if (leaves < 2) throw DomainError("agglomerative clustering needs at least 2 labels with nonzero profiles");

  // Active clusters by slot; slot i starts as leaf i. Distances between active
  // slots are kept current with Lance-Williams updates.
  std::vector<std::vector<double>> dist(leaves, std::vector<double>(leaves, 0.0));
  for (std::size_t i = 0; i < leaves; ++i) {
    for (std::size_t j = i + 1; j < leaves; ++j) {
      dist[i][j] = dist[j][i] = cosine_distance(y, columns[i], columns[j]);
    }
  }
  std::vector<bool> active(leaves, true);
  std::vector<std::size_t> id(leaves), size(leaves, 1), min_leaf(leaves);
  for (std::size_t i = 0; i < leaves; ++i) id[i] = min_leaf[i] = i;

  for (std::size_t step = 0; step + 1 < leaves; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{leaves, leaves};
    for (std::size_t i = 0; i < leaves; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < leaves; ++j) {
        if (!active[j]) continue;
        const std::pair<std::size_t, std::size_t> key = std::minmax(min_leaf[i], min_leaf[j]);
        if (dist[i][j] < best || (dist[i][j] == best && key < best_key)) {
          best = dist[i][j];
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }
    const std::size_t left = std::min(id[bi], id[bj]);
    const std::size_t right = std::max(id[bi], id[bj]);
    out.merges.push_back({left, right, best, size[bi] + size[bj]});

    for (std::size_t k = 0; k < leaves; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double d = 0.0;
      switch (linkage) {
        case Linkage::single: d = std::min(dist[bi][k], dist[bj][k]); break;
        case Linkage::complete: d = std::max(dist[bi][k], dist[bj][k]); break;
        case Linkage::average:
          d = (static_cast<double>(size[bi]) * dist[bi][k] + static_cast<double>(size[bj]) * dist[bj][k]) /
              static_cast<double>(size[bi] + size[bj]);
          break;
      }
      dist[bi][k] = dist[k][bi] = d;
    }
    active[bj] = false;
    size[bi] += size[bj];
    min_leaf[bi] = std::min(min_leaf[bi], min_leaf[bj]);
    id[bi] = leaves + step;
  }
  return out;
}

std::string Dendrogram::to_json() const {
  std::vector<ordered_json> nodes;
  nodes.reserve(labels.size() + merges.size());
  for (const auto& l : labels) nodes.push_back({{"label", l}});
  ordered_json flat = ordered_json::array();
  for (const auto& m : merges) {
    ordered_json node;
    node["height"] = m.height;
    node["size"] = m.size;
    node["children"] = {nodes[m.left], nodes[m.right]};
    nodes.push_back(std::move(node));
    flat.push_back({m.left, m.right, m.height, m.size});
  }
  ordered_json doc;
  doc["labels"] = labels;
  doc["excluded"] = excluded;
  doc["merges"] = std::move(flat);
  doc["tree"] = nodes.empty() ? ordered_json(nullptr) : nodes.back();
  return doc.dump(2) + "\n";
}

}  // namespace labeltree
