#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace labeltree {

// Trim ASCII whitespace and lowercase. Every label is stored in this form.
std::string normalize_label(std::string_view raw);

struct LabelGroup {
  std::string name;
  std::vector<std::string> members;
};

// Ordered set of class labels, optionally partitioned (not necessarily
// exhaustively) into named groups such as emotion-wheel families.
class LabelVocabulary {
 public:
  LabelVocabulary() = default;

  // Labels are normalized. Throws DataError on empty or duplicate labels,
  // unknown group members, overlapping groups or duplicate group names.
  explicit LabelVocabulary(std::vector<std::string> labels, std::vector<LabelGroup> groups = {});

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<LabelGroup>& groups() const { return groups_; }
  std::size_t size() const { return labels_.size(); }
  bool has_groups() const { return !groups_.empty(); }

  bool contains(std::string_view label) const;
  std::optional<std::size_t> index_of(std::string_view label) const;
  // Throws DataError for an unknown label.
  std::size_t require_index(std::string_view label) const;

  // Index into groups() for a label, if the label is grouped.
  std::optional<std::size_t> group_of(std::string_view label) const;

  bool operator==(const LabelVocabulary& other) const;

 private:
  std::vector<std::string> labels_;
  std::vector<LabelGroup> groups_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> group_index_;
};

// {"labels": [...], "groups": {name: [...]}}; group order follows the file.
LabelVocabulary parse_vocabulary(std::string_view json_text, const std::string& source_name = "<memory>");
LabelVocabulary load_vocabulary(const std::filesystem::path& path);
std::string vocabulary_to_json(const LabelVocabulary& vocab);
void save_vocabulary(const LabelVocabulary& vocab, const std::filesystem::path& path);

// Vocabularies compiled into the library. Currently "shaver135": the 135
// emotion words in six families (love, joy, surprise, anger, sadness, fear).
std::optional<LabelVocabulary> builtin_vocabulary(std::string_view name);
std::vector<std::string> builtin_vocabulary_names();

// Accepts either a builtin name or a path to a vocabulary file.
LabelVocabulary resolve_vocabulary(const std::string& name_or_path);

}  // namespace labeltree
