#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "labeltree/matrix.hpp"
#include "labeltree/vocabulary.hpp"

namespace labeltree {

inline constexpr double kRowSumTolerance = 1e-6;
inline constexpr std::size_t kDefaultTopK = 100;

struct InstanceMeta {
  std::string instance_id;
  std::optional<std::string> truth_label;
  std::optional<std::string> persona;
  std::optional<std::string> text;

  bool operator==(const InstanceMeta&) const = default;
};

struct ValidationIssue {
  std::string where;  // e.g. "matrix.csv:12" or "vocab.json"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool passed() const { return errors.empty(); }
  std::string to_json() const;
};

// N x K per-instance label probabilities with metadata. Rows need not sum to
// one (they are restricted to the vocabulary) but never exceed it.
class ProbabilityMatrixBundle {
 public:
  // Throws DataError if any invariant is violated.
  ProbabilityMatrixBundle(LabelVocabulary vocabulary, Matrix matrix, std::vector<InstanceMeta> meta);

  const LabelVocabulary& vocabulary() const { return vocabulary_; }
  const Matrix& matrix() const { return matrix_; }
  const std::vector<InstanceMeta>& meta() const { return meta_; }
  std::size_t instances() const { return matrix_.rows(); }
  std::size_t labels() const { return matrix_.cols(); }

  // Rows whose persona equals `persona` (nullopt selects rows without one).
  ProbabilityMatrixBundle select_persona(const std::optional<std::string>& persona) const;

  bool operator==(const ProbabilityMatrixBundle&) const = default;

 private:
  LabelVocabulary vocabulary_;
  Matrix matrix_;
  std::vector<InstanceMeta> meta_;
};

// Collects every problem with a bundle's contents instead of stopping at the
// first. `source` prefixes locations.
ValidationReport validate_contents(const LabelVocabulary& vocab, const Matrix& matrix,
                                   const std::vector<InstanceMeta>& meta, const std::string& source = "matrix.csv");

// Bundle directory: vocab.json, matrix.csv or matrix.csv.gz, optional meta.csv.
ValidationReport validate_bundle(const std::filesystem::path& dir);
ProbabilityMatrixBundle load_matrix_bundle(const std::filesystem::path& dir);
void save_bundle(const ProbabilityMatrixBundle& bundle, const std::filesystem::path& dir, bool gzip = false);

// Keeps the k largest entries of each row (ties: lower column first) and zeros
// the rest. Surviving entries are not renormalized.
ProbabilityMatrixBundle truncate_top_k(const ProbabilityMatrixBundle& bundle, std::size_t k);

}  // namespace labeltree
