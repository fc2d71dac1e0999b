#include "labeltree/export.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include <json.hpp>

#include "labeltree/error.hpp"

namespace labeltree {
namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.000" || s == "-0.0000") s.erase(0, 1);
  return s;
}

// Vocabulary order first, then forest-only nodes in forest order.
std::vector<std::string> display_order(const HierarchyForest& forest, const LabelVocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& l : vocab.labels()) {
    if (forest.contains(l)) out.push_back(l);
  }
  for (const auto& n : forest.nodes()) {
    if (!vocab.contains(n)) out.push_back(n);
  }
  return out;
}

struct Sector {
  std::size_t depth = 0;
  double start = 0.0;  // degrees, clockwise from 12 o'clock
  double span = 0.0;
};

constexpr double kCenter = 0.0;
constexpr double kInnerRadius = 40.0;
constexpr double kRingWidth = 90.0;
constexpr double kMargin = 20.0;

struct Point {
  double x, y;
};

Point polar(double radius, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  return {kCenter + radius * std::sin(rad), kCenter - radius * std::cos(rad)};
}

std::string sector_path(double r0, double r1, double start, double span) {
  auto pt = [](Point p) { return fixed(p.x) + " " + fixed(p.y); };
  const double end = start + span;
  if (span >= 360.0 - 1e-9) {
    // Full ring: two half arcs per circle, inner drawn in reverse.
    const double mid = start + 180.0;
    std::string d = "M " + pt(polar(r1, start)) + " A " + fixed(r1) + " " + fixed(r1) + " 0 1 1 " +
                    pt(polar(r1, mid)) + " A " + fixed(r1) + " " + fixed(r1) + " 0 1 1 " + pt(polar(r1, start)) +
                    " Z";
    if (r0 > 0.0) {
      d += " M " + pt(polar(r0, start)) + " A " + fixed(r0) + " " + fixed(r0) + " 0 1 0 " + pt(polar(r0, mid)) +
           " A " + fixed(r0) + " " + fixed(r0) + " 0 1 0 " + pt(polar(r0, start)) + " Z";
    }
    return d;
  }
  const char* large = span > 180.0 ? "1" : "0";
  return "M " + pt(polar(r0, start)) + " L " + pt(polar(r1, start)) + " A " + fixed(r1) + " " + fixed(r1) + " 0 " +
         large + " 1 " + pt(polar(r1, end)) + " L " + pt(polar(r0, end)) + " A " + fixed(r0) + " " + fixed(r0) +
         " 0 " + large + " 0 " + pt(polar(r0, start)) + " Z";
}

}  // namespace

std::string_view group_color(const LabelVocabulary& vocab, std::string_view label) {
  if (auto g = vocab.group_of(label)) return kGroupPalette[*g % kGroupPalette.size()];
  return kUngroupedColor;
}

std::string to_dot(const HierarchyForest& forest, const LabelVocabulary& vocab) {
  std::string out = "digraph hierarchy {\n";
  out += "  graph [rankdir=LR];\n";
  out += "  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n";
  for (const auto& n : display_order(forest, vocab)) {
    out += "  " + dot_quote(n) + " [fillcolor=" + dot_quote(group_color(vocab, n)) + "];\n";
  }
  std::map<std::string, ForestEdge> by_child;
  for (auto& e : forest.edges()) by_child.emplace(e.child, e);
  for (const auto& child : display_order(forest, vocab)) {
    if (auto it = by_child.find(child); it != by_child.end()) {
      out += "  " + dot_quote(it->second.parent) + " -> " + dot_quote(child) + " [label=" +
             dot_quote(fixed(it->second.confidence)) + "];\n";
    }
  }
  out += "}\n";
  return out;
}

std::string wheel_svg(const HierarchyForest& forest, const LabelVocabulary& vocab) {
  const auto order = display_order(forest, vocab);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank.emplace(order[i], i);

  std::map<std::string, std::vector<std::string>> kids;
  for (const auto& n : order) {
    if (auto p = forest.parent(n)) kids[*p].push_back(n);
  }
  std::map<std::string, std::size_t> leaf_count;
  // Children precede parents in topological order.
  std::vector<std::pair<std::string, std::string>> edge_pairs;
  for (const auto& e : forest.edges()) edge_pairs.emplace_back(e.child, e.parent);
  for (const auto& n : topological_order(order, edge_pairs)) {
    std::size_t count = 0;
    for (const auto& c : kids[n]) count += leaf_count.at(c);
    leaf_count[n] = count == 0 ? 1 : count;
  }

  std::vector<std::string> roots;
  for (const auto& n : order) {
    if (!forest.parent(n)) roots.push_back(n);
  }
  std::size_t all_leaves = 0;
  for (const auto& r : roots) all_leaves += leaf_count.at(r);

  std::map<std::string, Sector> sectors;
  std::size_t max_depth = 0;
  std::vector<std::string> stack;
  double cursor = 0.0;
  for (const auto& r : roots) {
    const double span = all_leaves ? 360.0 * static_cast<double>(leaf_count.at(r)) / static_cast<double>(all_leaves) : 0.0;
    sectors[r] = {0, cursor, span};
    cursor += span;
    stack.push_back(r);
  }
  while (!stack.empty()) {
    const std::string n = stack.back();
    stack.pop_back();
    const Sector s = sectors.at(n);
    max_depth = std::max(max_depth, s.depth);
    double start = s.start;
    for (const auto& c : kids[n]) {
      const double span = s.span * static_cast<double>(leaf_count.at(c)) / static_cast<double>(leaf_count.at(n));
      sectors[c] = {s.depth + 1, start, span};
      start += span;
      stack.push_back(c);
    }
  }

  const std::size_t rings = order.empty() ? 0 : max_depth + 1;
  const double outer = kInnerRadius + kRingWidth * static_cast<double>(rings);
  const double half = outer + kMargin;

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + fixed(-half) + " " + fixed(-half) +
         " " + fixed(2 * half) + " " + fixed(2 * half) + "\" width=\"" + fixed(2 * half, 0) + "\" height=\"" +
         fixed(2 * half, 0) + "\" data-rings=\"" + std::to_string(rings) + "\">\n";
  svg += "  <g class=\"rings\" fill=\"none\" stroke=\"#E0E0E0\">\n";
  for (std::size_t d = 0; d < rings; ++d) {
    svg += "    <circle class=\"ring\" data-depth=\"" + std::to_string(d) + "\" cx=\"0\" cy=\"0\" r=\"" +
           fixed(kInnerRadius + kRingWidth * static_cast<double>(d + 1)) + "\"/>\n";
  }
  svg += "  </g>\n  <g class=\"nodes\" stroke=\"#FFFFFF\" stroke-width=\"1\">\n";
  for (const auto& n : order) {
    const auto& s = sectors.at(n);
    const double r0 = kInnerRadius + kRingWidth * static_cast<double>(s.depth);
    const double r1 = r0 + kRingWidth;
    svg += "    <path class=\"node\" data-label=\"" + xml_escape(n) + "\" data-depth=\"" + std::to_string(s.depth) +
           "\" data-start=\"" + fixed(s.start, 4) + "\" data-span=\"" + fixed(s.span, 4) + "\" fill=\"" +
           std::string(group_color(vocab, n)) + "\" d=\"" + sector_path(r0, r1, s.start, s.span) + "\"/>\n";
  }
  svg += "  </g>\n  <g class=\"labels\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"9\" fill=\"#212121\">\n";
  for (const auto& n : order) {
    const auto& s = sectors.at(n);
    const double mid = s.start + s.span / 2.0;
    const double r = kInnerRadius + kRingWidth * (static_cast<double>(s.depth) + 0.5);
    const Point p = polar(r, mid);
    // Text runs along the radius; flip on the left half so it reads upright.
    double rotation = mid - 90.0;
    if (mid > 180.0) rotation -= 180.0;
    svg += "    <text x=\"" + fixed(p.x) + "\" y=\"" + fixed(p.y) + "\" text-anchor=\"middle\" dominant-baseline=\"middle\" transform=\"rotate(" +
           fixed(rotation) + " " + fixed(p.x) + " " + fixed(p.y) + ")\">" + xml_escape(n) + "</text>\n";
  }
  svg += "  </g>\n</svg>\n";
  return svg;
}

std::string chord_json(const ConfusionMatrix& cm) {
  nlohmann::ordered_json doc;
  doc["labels"] = cm.labels();
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < cm.size(); ++t) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.at(t, p));
    matrix.push_back(std::move(row));
  }
  doc["matrix"] = std::move(matrix);
  return doc.dump() + "\n";
}

ConfusionMatrix chord_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    ConfusionMatrix cm(doc.at("labels").get<std::vector<std::string>>());
    const auto& rows = doc.at("matrix");
    if (rows.size() != cm.size()) throw DataError("chord matrix row count does not match labels");
    for (std::size_t t = 0; t < cm.size(); ++t) {
      if (rows[t].size() != cm.size()) throw DataError("chord matrix row length does not match labels");
      for (std::size_t p = 0; p < cm.size(); ++p) cm.at(t, p) = rows[t][p].get<std::uint64_t>();
    }
    return cm;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed chord JSON: ") + e.what());
  }
}

}  // namespace labeltree
