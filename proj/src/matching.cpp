#include "labeltree/matching.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "labeltree/error.hpp"
#include "labeltree/io.hpp"

namespace labeltree {
namespace {

// Upper triangle (a <= b) of sum_n y_a y_b over rows [begin, end).
void accumulate_rows(const Matrix& y, std::size_t begin, std::size_t end, std::vector<long double>& acc) {
  const std::size_t k = y.cols();
  std::vector<std::size_t> nonzero;
  nonzero.reserve(k);
  for (std::size_t n = begin; n < end; ++n) {
    const auto row = y.row(n);
    nonzero.clear();
    for (std::size_t a = 0; a < k; ++a) {
      if (row[a] != 0.0) nonzero.push_back(a);
    }
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
      const std::size_t a = nonzero[i];
      const long double ya = row[a];
      long double* dst = acc.data() + a * k;
      for (std::size_t j = i; j < nonzero.size(); ++j) {
        const std::size_t b = nonzero[j];
        dst[b] += ya * static_cast<long double>(row[b]);
      }
    }
  }
}

}  // namespace

MatchingMatrix::MatchingMatrix(LabelVocabulary vocabulary, Matrix values)
    : vocabulary_(std::move(vocabulary)), values_(std::move(values)) {
  const std::size_t k = values_.rows();
  if (values_.cols() != k || k != vocabulary_.size()) {
    throw DataError("matching matrix must be K x K with K = vocabulary size");
  }
  masses_.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    long double sum = 0.0L;
    for (std::size_t b = 0; b < k; ++b) {
      const double v = values_(a, b);
      if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("matching matrix entries must be finite and >= 0");
      if (v != values_(b, a)) throw DataError("matching matrix is not symmetric");
      sum += v;
    }
    masses_[a] = static_cast<double>(sum);
  }
}

std::vector<std::string> MatchingMatrix::zero_mass_labels() const {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < size(); ++a) {
    if (masses_[a] == 0.0) out.push_back(vocabulary_.labels()[a]);
  }
  return out;
}

MatchingMatrix build_matching_matrix(const ProbabilityMatrixBundle& bundle, unsigned threads) {
  const Matrix& y = bundle.matrix();
  const std::size_t n = y.rows();
  const std::size_t k = y.cols();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));

  std::vector<long double> acc(k * k, 0.0L);
  if (threads == 1) {
    accumulate_rows(y, 0, n, acc);
  } else {
    std::vector<std::vector<long double>> partial(threads, std::vector<long double>(k * k, 0.0L));
    {
      std::vector<std::jthread> workers;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = n * t / threads;
        const std::size_t end = n * (t + 1) / threads;
        workers.emplace_back([&, t, begin, end] { accumulate_rows(y, begin, end, partial[t]); });
      }
    }
    for (const auto& p : partial) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
  }

  Matrix values(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double v = static_cast<double>(acc[a * k + b]);
      values(a, b) = v;
      values(b, a) = v;
    }
  }
  return {bundle.vocabulary(), std::move(values)};
}

double conditional_prob(const MatchingMatrix& c, std::size_t a, std::size_t b) {
  if (a >= c.size() || b >= c.size()) throw DomainError("label index out of range");
  if (c.mass(b) == 0.0) {
    throw DomainError("conditional probability given '" + c.vocabulary().labels()[b] +
                      "' is undefined: the label has zero mass");
  }
  return c(a, b) / c.mass(b);
}

double conditional_prob(const MatchingMatrix& c, std::string_view a, std::string_view b) {
  const auto& v = c.vocabulary();
  return conditional_prob(c, v.require_index(normalize_label(a)), v.require_index(normalize_label(b)));
}

void save_matching_matrix(const MatchingMatrix& c, const std::filesystem::path& path) {
  std::string text = io::csv_line(c.vocabulary().labels());
  std::vector<std::string> fields(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) {
    for (std::size_t b = 0; b < c.size(); ++b) fields[b] = io::format_double(c(a, b));
    text += io::csv_line(fields);
  }
  io::write_file(path, text);
}

MatchingMatrix load_matching_matrix(const std::filesystem::path& path, const LabelVocabulary& vocabulary) {
  const auto name = path.filename().string();
  const auto rows = io::parse_csv(io::read_file(path), name);
  const std::size_t k = vocabulary.size();
  if (rows.size() != k + 1 || rows.front().fields.size() != k) {
    throw DataError(name + ": expected a header and " + std::to_string(k) + " rows of " + std::to_string(k) + " values");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (normalize_label(rows.front().fields[c]) != vocabulary.labels()[c]) {
      throw DataError(name + ":1: header does not match vocabulary at column " + std::to_string(c + 1));
    }
  }
  Matrix values(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto& row = rows[a + 1];
    const auto where = name + ":" + std::to_string(row.line);
    if (row.fields.size() != k) throw DataError(where + ": expected " + std::to_string(k) + " values");
    for (std::size_t b = 0; b < k; ++b) values(a, b) = io::parse_double(row.fields[b], where);
  }
  return {vocabulary, std::move(values)};
}

}  // namespace labeltree
