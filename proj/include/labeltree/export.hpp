#pragma once

#include <array>
#include <string>
#include <string_view>

#include "labeltree/bias.hpp"
#include "labeltree/hierarchy.hpp"
#include "labeltree/vocabulary.hpp"

namespace labeltree {

// Fill colours for vocabulary groups, by group position (cycled past six).
// With the shaver135 vocabulary: love, joy, surprise, anger, sadness, fear.
inline constexpr std::array<std::string_view, 6> kGroupPalette = {
    "#F48FB1", "#FFD54F", "#4DD0E1", "#E57373", "#64B5F6", "#81C784"};
inline constexpr std::string_view kUngroupedColor = "#BDBDBD";

std::string_view group_color(const LabelVocabulary& vocab, std::string_view label);

// Graphviz digraph with one node statement per forest node (vocabulary order,
// then any nodes the vocabulary lacks) and one "parent -> child" statement per
// edge, labelled with the edge confidence.
std::string to_dot(const HierarchyForest& forest, const LabelVocabulary& vocab);

// Radial wheel: depth d occupies ring d, every subtree gets an angular span
// proportional to its leaf count, nodes are drawn as annular sectors filled
// with their group colour and labelled along the radius.
std::string wheel_svg(const HierarchyForest& forest, const LabelVocabulary& vocab);

// {"labels": [...], "matrix": [[...]]}, rows = truth.
std::string chord_json(const ConfusionMatrix& cm);
ConfusionMatrix chord_from_json(std::string_view text);

}  // namespace labeltree
