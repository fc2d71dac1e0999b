#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "labeltree/alignment.hpp"
#include "labeltree/bundle.hpp"
#include "labeltree/hierarchy.hpp"
#include "labeltree/vocabulary.hpp"

namespace labeltree {

// Total mapping from fine labels onto ordered coarse categories.
class CoarseMap {
 public:
  // Groups of the vocabulary become categories; throws DataError unless
  // every label is grouped.
  static CoarseMap from_groups(const LabelVocabulary& vocab);

  const std::vector<std::string>& categories() const { return categories_; }
  const std::string& category_of(const std::string& label) const;
  std::size_t category_index(const std::string& label) const;
  // Number of fine labels per category, in category order.
  std::vector<std::size_t> category_sizes() const;

 private:
  std::vector<std::string> categories_;
  std::map<std::string, std::size_t> category_;
};

// Counts with row = truth, column = prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts_[truth * labels_.size() + pred]; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts_[truth * labels_.size() + pred]; }
  std::size_t index_of(const std::string& label) const;

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t column_total(std::size_t pred) const;

  std::string to_csv() const;
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
};

struct FlowReport {
  std::string target;
  // truth category -> share of all instances that were predicted as target
  std::vector<std::pair<std::string, double>> proportions;
  // share of target predictions whose truth is also target (0 when nothing
  // was predicted as target)
  double accuracy_within_target = 0.0;

  std::string to_json() const;
};

// Argmax per row, ties to the lower column. Throws DomainError listing the
// all-zero rows, which cannot be scored.
std::vector<std::string> predict_labels(const ProbabilityMatrixBundle& bundle);

ConfusionMatrix confusion(const std::vector<std::string>& preds, const std::vector<std::string>& truths,
                          const LabelVocabulary& vocab);
ConfusionMatrix coarsen(const ConfusionMatrix& cm, const CoarseMap& map);
std::vector<std::string> coarsen_labels(const std::vector<std::string>& labels, const CoarseMap& map);

// trace / total; throws DomainError for an empty matrix.
double accuracy(const ConfusionMatrix& cm);

FlowReport flow_into(const ConfusionMatrix& coarse, const std::string& target);

std::size_t prediction_difference(const std::vector<std::string>& a, const std::vector<std::string>& b);

enum class GeometryMetric { total_path_length, average_depth };
GeometryMetric parse_geometry_metric(const std::string& name);

CorrelationResult geometry_accuracy_correlation(const std::vector<HierarchyForest>& forests,
                                                const std::vector<double>& accuracies, GeometryMetric metric);

// Truth labels of a bundle; throws DataError if any instance lacks one.
std::vector<std::string> truth_labels(const ProbabilityMatrixBundle& bundle);

// Distinct personas in first-appearance order (nullopt for untagged rows).
std::vector<std::optional<std::string>> personas(const ProbabilityMatrixBundle& bundle);

}  // namespace labeltree
