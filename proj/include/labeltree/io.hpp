#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace labeltree::io {

// Reads a whole file; transparently gunzips when the name ends in ".gz".
std::string read_file(const std::filesystem::path& path);
// Writes a whole file; gzips when the name ends in ".gz".
void write_file(const std::filesystem::path& path, std::string_view contents);

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 records: quoted fields may contain commas, quotes ("") and newlines.
// Blank lines are skipped. Throws DataError on an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text, const std::string& source_name);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
// Strict parse of a full decimal field; throws DataError with `where` context.
double parse_double(std::string_view text, const std::string& where);

}  // namespace labeltree::io
