#include "labeltree/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "labeltree/error.hpp"
#include "labeltree/io.hpp"

namespace labeltree {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxIssuesPerKind = 50;
const std::vector<std::string> kMetaHeader = {"instance_id", "truth_label", "persona", "text"};

class IssueSink {
 public:
  explicit IssueSink(std::vector<ValidationIssue>& out) : out_(out) {}
  void add(std::string where, std::string message) {
    if (++count_ <= kMaxIssuesPerKind) out_.push_back({std::move(where), std::move(message)});
  }
  void finish(const std::string& what) {
    if (count_ > kMaxIssuesPerKind) {
      out_.push_back({"", std::to_string(count_ - kMaxIssuesPerKind) + " further " + what + " suppressed"});
    }
  }

 private:
  std::vector<ValidationIssue>& out_;
  std::size_t count_ = 0;
};

std::optional<std::string> cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

struct ParsedBundle {
  std::optional<LabelVocabulary> vocab;
  Matrix matrix;
  std::vector<InstanceMeta> meta;
  ValidationReport report;
};

ParsedBundle parse_bundle_dir(const fs::path& dir) {
  ParsedBundle out;
  auto& errors = out.report.errors;

  if (!fs::is_directory(dir)) {
    errors.push_back({dir.string(), "bundle directory does not exist"});
    return out;
  }
  try {
    out.vocab = load_vocabulary(dir / "vocab.json");
  } catch (const DataError& e) {
    errors.push_back({"vocab.json", e.what()});
    return out;
  }
  const auto& vocab = *out.vocab;

  const fs::path plain = dir / "matrix.csv";
  const fs::path gz = dir / "matrix.csv.gz";
  const bool has_plain = fs::exists(plain);
  const bool has_gz = fs::exists(gz);
  if (has_plain && has_gz) {
    errors.push_back({dir.string(), "both matrix.csv and matrix.csv.gz present"});
    return out;
  }
  if (!has_plain && !has_gz) {
    errors.push_back({dir.string(), "missing matrix.csv"});
    return out;
  }
  const fs::path matrix_path = has_plain ? plain : gz;
  const std::string matrix_name = matrix_path.filename().string();

  std::vector<io::CsvRow> rows;
  try {
    rows = io::parse_csv(io::read_file(matrix_path), matrix_name);
  } catch (const DataError& e) {
    errors.push_back({matrix_name, e.what()});
    return out;
  }
  if (rows.empty()) {
    errors.push_back({matrix_name, "empty file (header row required)"});
    return out;
  }

  const auto& header = rows.front();
  const std::size_t k = vocab.size();
  if (header.fields.size() != k) {
    errors.push_back({matrix_name + ":1", "dimension mismatch: header has " + std::to_string(header.fields.size()) +
                                              " columns, vocabulary has " + std::to_string(k) + " labels"});
    return out;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (normalize_label(header.fields[c]) != vocab.labels()[c]) {
      errors.push_back({matrix_name + ":1", "column " + std::to_string(c + 1) + " is '" + header.fields[c] +
                                                "' but vocabulary label is '" + vocab.labels()[c] + "'"});
    }
  }
  if (!errors.empty()) return out;

  out.matrix = Matrix(rows.size() - 1, k);
  {
    IssueSink sink(errors);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto where = matrix_name + ":" + std::to_string(rows[r].line);
      if (rows[r].fields.size() != k) {
        sink.add(where, "dimension mismatch: " + std::to_string(rows[r].fields.size()) + " values, expected " +
                            std::to_string(k));
        continue;
      }
      for (std::size_t c = 0; c < k; ++c) {
        try {
          out.matrix(r - 1, c) = io::parse_double(rows[r].fields[c], where);
        } catch (const DataError& e) {
          sink.add(where, e.what());
        }
      }
    }
    sink.finish("matrix errors");
  }
  if (!errors.empty()) return out;

  const fs::path meta_path = dir / "meta.csv";
  if (fs::exists(meta_path)) {
    std::vector<io::CsvRow> meta_rows;
    try {
      meta_rows = io::parse_csv(io::read_file(meta_path), "meta.csv");
    } catch (const DataError& e) {
      errors.push_back({"meta.csv", e.what()});
      return out;
    }
    if (meta_rows.empty() || meta_rows.front().fields != kMetaHeader) {
      errors.push_back({"meta.csv:1", "header must be instance_id,truth_label,persona,text"});
      return out;
    }
    IssueSink sink(errors);
    for (std::size_t r = 1; r < meta_rows.size(); ++r) {
      auto& f = meta_rows[r].fields;
      if (f.size() != kMetaHeader.size()) {
        sink.add("meta.csv:" + std::to_string(meta_rows[r].line),
                 "expected 4 fields, found " + std::to_string(f.size()));
        continue;
      }
      InstanceMeta m;
      m.instance_id = f[0];
      if (auto t = cell(f[1])) m.truth_label = normalize_label(*t);
      m.persona = cell(f[2]);
      m.text = cell(f[3]);
      out.meta.push_back(std::move(m));
    }
    sink.finish("metadata errors");
    if (!errors.empty()) return out;
  } else {
    out.meta.resize(out.matrix.rows());
    for (std::size_t r = 0; r < out.meta.size(); ++r) out.meta[r].instance_id = std::to_string(r);
  }

  auto contents = validate_contents(vocab, out.matrix, out.meta, matrix_name);
  errors.insert(errors.end(), contents.errors.begin(), contents.errors.end());
  out.report.warnings = std::move(contents.warnings);
  return out;
}

std::string report_summary(const ValidationReport& report) {
  std::string msg;
  const std::size_t shown = std::min<std::size_t>(report.errors.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) msg += "; ";
    const auto& e = report.errors[i];
    msg += e.where.empty() ? e.message : e.where + ": " + e.message;
  }
  if (report.errors.size() > shown) msg += "; and " + std::to_string(report.errors.size() - shown) + " more";
  return msg;
}

}  // namespace

std::string ValidationReport::to_json() const {
  auto issues = [](const std::vector<ValidationIssue>& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& i : list) arr.push_back({{"where", i.where}, {"message", i.message}});
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["passed"] = passed();
  doc["errors"] = issues(errors);
  doc["warnings"] = issues(warnings);
  return doc.dump(2) + "\n";
}

ValidationReport validate_contents(const LabelVocabulary& vocab, const Matrix& matrix,
                                   const std::vector<InstanceMeta>& meta, const std::string& source) {
  ValidationReport report;
  const std::size_t n = matrix.rows();
  const std::size_t k = matrix.cols();
  if (k != vocab.size()) {
    report.errors.push_back({source, "dimension mismatch: " + std::to_string(k) + " columns, vocabulary has " +
                                         std::to_string(vocab.size()) + " labels"});
    return report;
  }
  if (k < 2) report.errors.push_back({source, "at least 2 labels required"});
  if (n < 1) report.errors.push_back({source, "at least 1 instance required"});
  if (meta.size() != n) {
    report.errors.push_back({"meta.csv", "metadata has " + std::to_string(meta.size()) + " rows, matrix has " +
                                             std::to_string(n)});
  }

  // Header is line 1, so data row r lives on line r + 2 in a canonical file.
  auto where = [&](std::size_t r) { return source + ":" + std::to_string(r + 2); };
  IssueSink value_errors(report.errors);
  IssueSink zero_rows(report.warnings);
  std::vector<long double> column_mass(k, 0.0L);
  for (std::size_t r = 0; r < n; ++r) {
    long double sum = 0.0L;
    bool row_ok = true;
    for (std::size_t c = 0; c < k; ++c) {
      const double v = matrix(r, c);
      if (!std::isfinite(v)) {
        value_errors.add(where(r), "non-finite entry in column '" + vocab.labels()[c] + "'");
        row_ok = false;
      } else if (v < 0.0) {
        value_errors.add(where(r), "negative entry " + io::format_double(v) + " in column '" + vocab.labels()[c] + "'");
        row_ok = false;
      } else {
        sum += v;
        column_mass[c] += v;
      }
    }
    if (!row_ok) continue;
    if (sum > 1.0L + kRowSumTolerance) {
      value_errors.add(where(r), "row sum " + io::format_double(static_cast<double>(sum)) + " exceeds 1 + 1e-6");
    } else if (sum == 0.0L) {
      zero_rows.add(where(r), "all-zero row (instance cannot be scored)");
    }
  }
  value_errors.finish("value errors");
  zero_rows.finish("zero-row warnings");

  IssueSink truth_errors(report.errors);
  for (std::size_t r = 0; r < meta.size(); ++r) {
    if (meta[r].truth_label && !vocab.contains(normalize_label(*meta[r].truth_label))) {
      truth_errors.add("meta.csv:" + std::to_string(r + 2), "unknown truth label '" + *meta[r].truth_label + "'");
    }
  }
  truth_errors.finish("truth-label errors");

  for (std::size_t c = 0; c < k; ++c) {
    if (column_mass[c] == 0.0L && n > 0) {
      report.warnings.push_back({source, "label '" + vocab.labels()[c] + "' has zero probability in every row"});
    }
  }
  return report;
}

ProbabilityMatrixBundle::ProbabilityMatrixBundle(LabelVocabulary vocabulary, Matrix matrix,
                                                 std::vector<InstanceMeta> meta)
    : vocabulary_(std::move(vocabulary)), matrix_(std::move(matrix)), meta_(std::move(meta)) {
  for (auto& m : meta_) {
    if (m.truth_label) m.truth_label = normalize_label(*m.truth_label);
  }
  const auto report = validate_contents(vocabulary_, matrix_, meta_);
  if (!report.passed()) throw DataError(report_summary(report));
}

ProbabilityMatrixBundle ProbabilityMatrixBundle::select_persona(const std::optional<std::string>& persona) const {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < meta_.size(); ++r) {
    if (meta_[r].persona == persona) keep.push_back(r);
  }
  Matrix m(keep.size(), matrix_.cols());
  std::vector<InstanceMeta> meta;
  meta.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    std::ranges::copy(matrix_.row(keep[i]), m.row(i).begin());
    meta.push_back(meta_[keep[i]]);
  }
  return {vocabulary_, std::move(m), std::move(meta)};
}

ValidationReport validate_bundle(const std::filesystem::path& dir) { return parse_bundle_dir(dir).report; }

ProbabilityMatrixBundle load_matrix_bundle(const std::filesystem::path& dir) {
  auto parsed = parse_bundle_dir(dir);
  if (!parsed.report.passed()) throw DataError(dir.string() + ": " + report_summary(parsed.report));
  return {std::move(*parsed.vocab), std::move(parsed.matrix), std::move(parsed.meta)};
}

void save_bundle(const ProbabilityMatrixBundle& bundle, const std::filesystem::path& dir, bool gzip) {
  fs::create_directories(dir);
  save_vocabulary(bundle.vocabulary(), dir / "vocab.json");

  std::string matrix_text = io::csv_line(bundle.vocabulary().labels());
  std::vector<std::string> fields(bundle.labels());
  for (std::size_t r = 0; r < bundle.instances(); ++r) {
    for (std::size_t c = 0; c < bundle.labels(); ++c) fields[c] = io::format_double(bundle.matrix()(r, c));
    matrix_text += io::csv_line(fields);
  }
  fs::remove(dir / (gzip ? "matrix.csv" : "matrix.csv.gz"));
  io::write_file(dir / (gzip ? "matrix.csv.gz" : "matrix.csv"), matrix_text);

  std::string meta_text = io::csv_line(kMetaHeader);
  for (const auto& m : bundle.meta()) {
    meta_text += io::csv_line({m.instance_id, m.truth_label.value_or(""), m.persona.value_or(""), m.text.value_or("")});
  }
  io::write_file(dir / "meta.csv", meta_text);
}

ProbabilityMatrixBundle truncate_top_k(const ProbabilityMatrixBundle& bundle, std::size_t k) {
  const std::size_t cols = bundle.labels();
  if (k < 1 || k > cols) {
    throw DomainError("top-k must be in [1, " + std::to_string(cols) + "], got " + std::to_string(k));
  }
  if (k == cols) return bundle;

  Matrix out = bundle.matrix();
  std::vector<std::size_t> order(cols);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
    for (auto it = order.begin() + static_cast<std::ptrdiff_t>(k); it != order.end(); ++it) row[*it] = 0.0;
  }
  return {bundle.vocabulary(), std::move(out), bundle.meta()};
}

}  // namespace labeltree
