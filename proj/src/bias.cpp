#include "labeltree/bias.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "labeltree/error.hpp"
#include "labeltree/io.hpp"

namespace labeltree {

CoarseMap CoarseMap::from_groups(const LabelVocabulary& vocab) {
  CoarseMap map;
  for (std::size_t g = 0; g < vocab.groups().size(); ++g) {
    map.categories_.push_back(vocab.groups()[g].name);
    for (const auto& m : vocab.groups()[g].members) map.category_.emplace(m, g);
  }
  std::vector<std::string> missing;
  for (const auto& l : vocab.labels()) {
    if (!map.category_.contains(l)) missing.push_back(l);
  }
  if (!missing.empty()) {
    throw DataError("coarse map must cover every label; " + std::to_string(missing.size()) +
                    " ungrouped, first '" + missing.front() + "'");
  }
  return map;
}

const std::string& CoarseMap::category_of(const std::string& label) const {
  return categories_[category_index(label)];
}

std::size_t CoarseMap::category_index(const std::string& label) const {
  auto it = category_.find(label);
  if (it == category_.end()) throw DataError("label '" + label + "' has no coarse category");
  return it->second;
}

std::vector<std::size_t> CoarseMap::category_sizes() const {
  std::vector<std::size_t> sizes(categories_.size(), 0);
  for (const auto& [label, c] : category_) ++sizes[c];
  return sizes;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

std::size_t ConfusionMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DataError("label '" + label + "' is not in the confusion matrix");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::column_total(std::size_t pred) const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += at(i, pred);
  return t;
}

std::string ConfusionMatrix::to_csv() const {
  std::vector<std::string> header{"truth\\pred"};
  header.insert(header.end(), labels_.begin(), labels_.end());
  std::string out = io::csv_line(header);
  for (std::size_t t = 0; t < size(); ++t) {
    std::vector<std::string> row{labels_[t]};
    for (std::size_t p = 0; p < size(); ++p) row.push_back(std::to_string(at(t, p)));
    out += io::csv_line(row);
  }
  return out;
}

std::string FlowReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["target"] = target;
  nlohmann::ordered_json props = nlohmann::ordered_json::object();
  for (const auto& [category, share] : proportions) props[category] = share;
  doc["proportions"] = std::move(props);
  doc["accuracy_within_target"] = accuracy_within_target;
  return doc.dump(2);
}

std::vector<std::string> predict_labels(const ProbabilityMatrixBundle& bundle) {
  const auto& y = bundle.matrix();
  std::vector<std::string> out;
  out.reserve(y.rows());
  std::vector<std::size_t> unscorable;
  for (std::size_t r = 0; r < y.rows(); ++r) {
    const auto row = y.row(r);
    // max_element returns the first maximum, i.e. the lowest column on ties.
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    if (row[best] <= 0.0) {
      unscorable.push_back(r);
      continue;
    }
    out.push_back(bundle.vocabulary().labels()[best]);
  }
  if (!unscorable.empty()) {
    std::string rows;
    for (std::size_t i = 0; i < std::min<std::size_t>(unscorable.size(), 10); ++i) {
      rows += (i ? ", " : "") + bundle.meta()[unscorable[i]].instance_id;
    }
    if (unscorable.size() > 10) rows += ", ...";
    throw DomainError(std::to_string(unscorable.size()) + " unscorable instance(s) with all-zero rows: " + rows);
  }
  return out;
}

ConfusionMatrix confusion(const std::vector<std::string>& preds, const std::vector<std::string>& truths,
                          const LabelVocabulary& vocab) {
  if (preds.size() != truths.size()) throw DomainError("predictions and truths differ in length");
  ConfusionMatrix cm(vocab.labels());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++cm.at(vocab.require_index(truths[i]), vocab.require_index(preds[i]));
  }
  return cm;
}

ConfusionMatrix coarsen(const ConfusionMatrix& cm, const CoarseMap& map) {
  ConfusionMatrix out(map.categories());
  std::vector<std::size_t> category(cm.size());
  for (std::size_t i = 0; i < cm.size(); ++i) category[i] = map.category_index(cm.labels()[i]);
  for (std::size_t t = 0; t < cm.size(); ++t) {
    for (std::size_t p = 0; p < cm.size(); ++p) out.at(category[t], category[p]) += cm.at(t, p);
  }
  return out;
}

std::vector<std::string> coarsen_labels(const std::vector<std::string>& labels, const CoarseMap& map) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(map.category_of(l));
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw DomainError("accuracy undefined for an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

FlowReport flow_into(const ConfusionMatrix& coarse, const std::string& target) {
  const auto it = std::find(coarse.labels().begin(), coarse.labels().end(), target);
  if (it == coarse.labels().end()) throw DomainError("unknown flow target '" + target + "'");
  const auto col = static_cast<std::size_t>(it - coarse.labels().begin());
  const auto total = coarse.total();
  if (total == 0) throw DomainError("flow undefined for an empty confusion matrix");

  FlowReport report;
  report.target = target;
  for (std::size_t t = 0; t < coarse.size(); ++t) {
    report.proportions.emplace_back(coarse.labels()[t],
                                    static_cast<double>(coarse.at(t, col)) / static_cast<double>(total));
  }
  if (const auto predicted = coarse.column_total(col); predicted > 0) {
    report.accuracy_within_target = static_cast<double>(coarse.at(col, col)) / static_cast<double>(predicted);
  }
  return report;
}

std::size_t prediction_difference(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw DomainError("prediction lists differ in length");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i] ? 1 : 0;
  return diff;
}

GeometryMetric parse_geometry_metric(const std::string& name) {
  if (name == "total_path_length") return GeometryMetric::total_path_length;
  if (name == "average_depth") return GeometryMetric::average_depth;
  throw DomainError("unknown metric '" + name + "' (expected total_path_length or average_depth)");
}

CorrelationResult geometry_accuracy_correlation(const std::vector<HierarchyForest>& forests,
                                                const std::vector<double>& accuracies, GeometryMetric metric) {
  if (forests.size() != accuracies.size()) throw DomainError("one accuracy per forest required");
  if (forests.size() < 3) throw DomainError("at least 3 personas required");
  std::vector<double> values;
  values.reserve(forests.size());
  for (const auto& f : forests) {
    values.push_back(metric == GeometryMetric::total_path_length ? static_cast<double>(total_path_length(f))
                                                                 : average_depth(f));
  }
  return pearson(values, accuracies);
}

std::vector<std::string> truth_labels(const ProbabilityMatrixBundle& bundle) {
  std::vector<std::string> out;
  out.reserve(bundle.instances());
  for (const auto& m : bundle.meta()) {
    if (!m.truth_label) throw DataError("instance '" + m.instance_id + "' has no truth label");
    out.push_back(*m.truth_label);
  }
  return out;
}

std::vector<std::optional<std::string>> personas(const ProbabilityMatrixBundle& bundle) {
  std::vector<std::optional<std::string>> out;
  for (const auto& m : bundle.meta()) {
    if (std::find(out.begin(), out.end(), m.persona) == out.end()) out.push_back(m.persona);
  }
  return out;
}

}  // namespace labeltree
