#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "labeltree/bundle.hpp"
#include "labeltree/matrix.hpp"
#include "labeltree/vocabulary.hpp"

namespace labeltree {

// Label co-occurrence matrix C = Y^T Y with cached row masses
// mass[a] = sum_i C[a][i] (diagonal included).
class MatchingMatrix {
 public:
  // Takes ownership of a K x K symmetric nonnegative matrix; throws DataError
  // otherwise. Masses are recomputed from the values.
  MatchingMatrix(LabelVocabulary vocabulary, Matrix values);

  const LabelVocabulary& vocabulary() const { return vocabulary_; }
  const Matrix& values() const { return values_; }
  const std::vector<double>& masses() const { return masses_; }
  std::size_t size() const { return values_.rows(); }

  double operator()(std::size_t a, std::size_t b) const { return values_(a, b); }
  double mass(std::size_t a) const { return masses_[a]; }

  // Labels never predicted anywhere; excluded from hierarchy inference.
  std::vector<std::string> zero_mass_labels() const;

 private:
  LabelVocabulary vocabulary_;
  Matrix values_;
  std::vector<double> masses_;
};

// values[a][b] = sum_n Y[n][a] * Y[n][b]. The upper triangle is accumulated in
// long double and mirrored. With threads > 1 rows are split into contiguous
// chunks whose partial sums are reduced in chunk order; results are then
// reproducible for a fixed thread count and agree across thread counts to
// about 1e-12.
MatchingMatrix build_matching_matrix(const ProbabilityMatrixBundle& bundle, unsigned threads = 1);

// Estimate of P(a | b) = C[a][b] / mass[b]. Throws DomainError when mass[b]
// is zero: the conditional is undefined, not 0.
double conditional_prob(const MatchingMatrix& c, std::size_t a, std::size_t b);
double conditional_prob(const MatchingMatrix& c, std::string_view a, std::string_view b);

// Cache format: the matrix CSV layout (label header row, then K rows).
void save_matching_matrix(const MatchingMatrix& c, const std::filesystem::path& path);
MatchingMatrix load_matching_matrix(const std::filesystem::path& path, const LabelVocabulary& vocabulary);

}  // namespace labeltree
