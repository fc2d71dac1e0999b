#include <doctest.h>

#include <cmath>
#include <limits>

#include "labeltree/bundle.hpp"
#include "labeltree/error.hpp"
#include "labeltree/io.hpp"
#include "labeltree/vocabulary.hpp"
#include "support.hpp"

using namespace labeltree;
using testing_support::TempDir;

namespace {

ProbabilityMatrixBundle tiny_bundle() {
  Matrix m(2, 3);
  m(0, 0) = 0.5, m(0, 1) = 0.3, m(0, 2) = 0.1;
  m(1, 0) = 0.0, m(1, 1) = 0.2, m(1, 2) = 0.7;
  return ProbabilityMatrixBundle(LabelVocabulary({"joy", "fear", "anger"}, {{"pos", {"joy"}}, {"neg", {"fear", "anger"}}}),
                                 m, {{"a", "joy", "calm", "hello, \"world\""}, {"b", "anger", std::nullopt, std::nullopt}});
}

void write_dir(const TempDir& d, const std::string& vocab, const std::string& matrix, const std::string& meta = "") {
  io::write_file(d / "vocab.json", vocab);
  io::write_file(d / "matrix.csv", matrix);
  if (!meta.empty()) io::write_file(d / "meta.csv", meta);
}

}  // namespace

TEST_CASE("csv parsing handles quotes, newlines, blank lines and a BOM") {
  const auto rows = io::parse_csv("\xEF\xBB\xBF" "a,b\n\n\"x,1\",\"say \"\"hi\"\"\nthere\"\r\nlast,\n", "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
  CHECK(rows[1].line == 3);
  CHECK(rows[1].fields == std::vector<std::string>{"x,1", "say \"hi\"\nthere"});
  CHECK(rows[2].fields == std::vector<std::string>{"last", ""});
  CHECK_THROWS_AS(io::parse_csv("\"open", "t.csv"), DataError);
  CHECK(io::csv_line({"a", "b,c", "d\"e"}) == "a,\"b,c\",\"d\"\"e\"\n");
}

TEST_CASE("doubles round-trip through their shortest form") {
  for (double v : {0.1, 1.0 / 3.0, 5e-324, 0.0, 123456789.125}) {
    CHECK(io::parse_double(io::format_double(v), "x") == v);
  }
  CHECK(io::parse_double("+0.5", "x") == 0.5);
  CHECK_THROWS_AS(io::parse_double("0.5x", "x"), DataError);
  CHECK_THROWS_AS(io::parse_double("", "x"), DataError);
}

TEST_CASE("gzip files round-trip") {
  TempDir d;
  std::string text(10000, 'q');
  io::write_file(d / "f.txt.gz", text);
  CHECK(io::read_file(d / "f.txt.gz") == text);
}

TEST_CASE("vocabulary normalizes and rejects malformed input") {
  CHECK(normalize_label("  Joy \t") == "joy");
  const auto v = parse_vocabulary(R"({"labels": [" Joy", "FEAR", "anger"], "groups": {"z": ["fear"], "a": ["joy"]}})");
  CHECK(v.labels() == std::vector<std::string>{"joy", "fear", "anger"});
  REQUIRE(v.groups().size() == 2);
  CHECK(v.groups()[0].name == "z");
  CHECK(v.group_of("anger") == std::nullopt);
  CHECK(v.group_of("fear") == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(LabelVocabulary({"a", " A"}), DataError);
  CHECK_THROWS_AS(LabelVocabulary({"a", "b"}, {{"g", {"c"}}}), DataError);
  CHECK_THROWS_AS(LabelVocabulary({"a", "b"}, {{"g", {"a"}}, {"h", {"a"}}}), DataError);
  CHECK_THROWS_AS(parse_vocabulary("{\"labels\": [1]}"), DataError);
  CHECK_THROWS_AS(parse_vocabulary("{\"labels\": "), DataError);
  CHECK(parse_vocabulary(vocabulary_to_json(v)) == v);
}

TEST_CASE("shaver135 family sizes") {
  const auto v = resolve_vocabulary("shaver135");
  CHECK(v.size() == 135);
  std::vector<std::pair<std::string, std::size_t>> sizes;
  for (const auto& g : v.groups()) sizes.emplace_back(g.name, g.members.size());
  CHECK(sizes == std::vector<std::pair<std::string, std::size_t>>{
                     {"love", 16}, {"joy", 33}, {"surprise", 3}, {"anger", 29}, {"sadness", 37}, {"fear", 17}});
  CHECK(v.contains("rage"));
  CHECK(v.contains("terror"));
}

TEST_CASE("bundle round-trips through a directory, plain and gzip") {
  const auto b = tiny_bundle();
  for (bool gz : {false, true}) {
    TempDir d;
    save_bundle(b, d.path(), gz);
    CHECK(std::filesystem::exists(d / (gz ? "matrix.csv.gz" : "matrix.csv")));
    CHECK(validate_bundle(d.path()).passed());
    CHECK(load_matrix_bundle(d.path()) == b);
  }
}

TEST_CASE("validation reports located errors") {
  TempDir d;
  const std::string vocab = R"({"labels": ["a", "b"]})";

  SUBCASE("dimension mismatch") {
    write_dir(d, vocab, "a,b\n0.1,0.2,0.3\n");
    const auto r = validate_bundle(d.path());
    REQUIRE_FALSE(r.passed());
    CHECK(r.errors[0].where == "matrix.csv:2");
    CHECK(r.errors[0].message.find("dimension mismatch") != std::string::npos);
  }
  SUBCASE("header order must follow the vocabulary") {
    write_dir(d, vocab, "b,a\n0.1,0.2\n");
    CHECK_FALSE(validate_bundle(d.path()).passed());
  }
  SUBCASE("row sum above one") {
    write_dir(d, vocab, "a,b\n0.6,0.4000001\n0.6,0.41\n");
    const auto r = validate_bundle(d.path());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].where == "matrix.csv:3");
  }
  SUBCASE("negative and non-numeric entries") {
    write_dir(d, vocab, "a,b\n-0.1,0.2\n0.1,-0.2\n");
    CHECK(validate_bundle(d.path()).errors.size() == 2);
    write_dir(d, vocab, "a,b\n0.1,0.2\nx,0.1\n");
    const auto r = validate_bundle(d.path());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].where == "matrix.csv:3");
  }
  SUBCASE("unknown truth label and meta length") {
    write_dir(d, vocab, "a,b\n0.1,0.2\n", "instance_id,truth_label,persona,text\n1,zzz,,\n");
    const auto r = validate_bundle(d.path());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].message.find("zzz") != std::string::npos);
    write_dir(d, vocab, "a,b\n0.1,0.2\n", "instance_id,truth_label,persona,text\n1,a,,\n2,b,,\n");
    CHECK_FALSE(validate_bundle(d.path()).passed());
  }
  SUBCASE("warnings do not fail") {
    write_dir(d, vocab, "a,b\n0,0\n0.5,0\n");
    const auto r = validate_bundle(d.path());
    CHECK(r.passed());
    CHECK(r.warnings.size() == 2);
    CHECK(r.to_json().find("\"passed\": true") != std::string::npos);
  }
  SUBCASE("missing pieces") {
    CHECK_FALSE(validate_bundle(d / "nope").passed());
    io::write_file(d / "vocab.json", vocab);
    CHECK_FALSE(validate_bundle(d.path()).passed());
    CHECK_THROWS_AS(load_matrix_bundle(d.path()), DataError);
  }
}

TEST_CASE("bundle constructor enforces invariants") {
  LabelVocabulary v({"a", "b"});
  Matrix bad(1, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ProbabilityMatrixBundle(v, bad, {{"x", {}, {}, {}}}), DataError);
  CHECK_THROWS_AS(ProbabilityMatrixBundle(v, Matrix(1, 3), {{"x", {}, {}, {}}}), DataError);
  CHECK_THROWS_AS(ProbabilityMatrixBundle(LabelVocabulary({"a"}), Matrix(1, 1), {{"x", {}, {}, {}}}), DataError);
}

TEST_CASE("top-k truncation keeps the k largest entries without renormalizing") {
  const auto b = tiny_bundle();
  const auto t1 = truncate_top_k(b, 1);
  CHECK(t1.matrix()(0, 0) == 0.5);
  CHECK(t1.matrix()(0, 1) == 0.0);
  CHECK(t1.matrix()(1, 2) == 0.7);
  CHECK(truncate_top_k(b, 3) == b);
  CHECK_THROWS_AS(truncate_top_k(b, 0), DomainError);
  CHECK_THROWS_AS(truncate_top_k(b, 4), DomainError);

  Matrix tie(1, 3, 0.25);
  ProbabilityMatrixBundle tb(LabelVocabulary({"a", "b", "c"}), tie, {{"x", {}, {}, {}}});
  const auto t2 = truncate_top_k(tb, 2);
  CHECK(t2.matrix()(0, 0) == 0.25);
  CHECK(t2.matrix()(0, 1) == 0.25);
  CHECK(t2.matrix()(0, 2) == 0.0);
}

TEST_CASE("persona selection") {
  const auto b = tiny_bundle();
  CHECK(b.select_persona(std::string("calm")).instances() == 1);
  CHECK(b.select_persona(std::nullopt).meta()[0].instance_id == "b");
}

// Layout written by the Python extraction client: gzip matrix, quoted prompt
// text with commas and newlines, persona tags, unnormalized label casing.
TEST_CASE("client-style bundle passes validation") {
  TempDir d;
  io::write_file(d / "vocab.json", R"({"labels": ["Joy", "Fear", "Anger"], "groups": {"positive": ["joy"], "negative": ["fear", "anger"]}})");
  io::write_file(d / "matrix.csv.gz", "joy,fear,anger\n0.61,0.2,0.1\n0.05,0.9,0.049999\n1e-3,0,0.998\n");
  io::write_file(d / "meta.csv",
                 "instance_id,truth_label,persona,text\n"
                 "s0,Joy,,\"I won, finally!\"\n"
                 "s1,fear,old man,\"A noise\nin the night\"\n"
                 "s2,anger,old man,\"They said \"\"no\"\"\"\n");
  const auto report = validate_bundle(d.path());
  CHECK(report.passed());
  const auto b = load_matrix_bundle(d.path());
  CHECK(b.instances() == 3);
  CHECK(b.meta()[0].truth_label == std::optional<std::string>("joy"));
  CHECK(b.meta()[0].persona == std::nullopt);
  CHECK(b.meta()[1].text == std::optional<std::string>("A noise\nin the night"));
}
