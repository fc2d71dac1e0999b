#include "labeltree/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <json.hpp>

#include "labeltree/error.hpp"
#include "labeltree/io.hpp"

namespace labeltree {

namespace detail {
extern const std::string_view kShaver135Json;
}

namespace {

using ordered_json = nlohmann::ordered_json;

// 1-based line of the nth (0-based) occurrence of `needle` in `text`, or 0.
std::size_t line_of_occurrence(std::string_view text, std::string_view needle, std::size_t nth) {
  std::size_t pos = 0;
  for (std::size_t seen = 0;; ++seen) {
    pos = text.find(needle, pos);
    if (pos == std::string_view::npos) return 0;
    if (seen == nth) break;
    pos += needle.size();
  }
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) + 1;
}

std::string at_line(const std::string& source, std::size_t line) {
  return line ? source + ":" + std::to_string(line) : source;
}

}  // namespace

std::string normalize_label(std::string_view raw) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!raw.empty() && is_space(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && is_space(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  std::string out(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels, std::vector<LabelGroup> groups) {
  labels_.reserve(labels.size());
  for (auto& raw : labels) {
    std::string label = normalize_label(raw);
    if (label.empty()) throw DataError("empty label at position " + std::to_string(labels_.size()));
    if (!index_.emplace(label, labels_.size()).second) {
      throw DataError("duplicate label '" + label + "' (from '" + raw + "')");
    }
    labels_.push_back(std::move(label));
  }
  std::unordered_set<std::string> group_names;
  for (auto& group : groups) {
    LabelGroup g;
    g.name = group.name;
    if (!group_names.insert(g.name).second) throw DataError("duplicate group name '" + g.name + "'");
    for (auto& raw : group.members) {
      std::string member = normalize_label(raw);
      if (!index_.contains(member)) {
        throw DataError("group '" + g.name + "' references unknown label '" + raw + "'");
      }
      if (!group_index_.emplace(member, groups_.size()).second) {
        throw DataError("label '" + member + "' appears in more than one group (second: '" + g.name + "')");
      }
      g.members.push_back(std::move(member));
    }
    groups_.push_back(std::move(g));
  }
}

bool LabelVocabulary::contains(std::string_view label) const { return index_.contains(std::string(label)); }

std::optional<std::size_t> LabelVocabulary::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelVocabulary::require_index(std::string_view label) const {
  if (auto idx = index_of(label)) return *idx;
  throw DataError("label '" + std::string(label) + "' is not in the vocabulary");
}

std::optional<std::size_t> LabelVocabulary::group_of(std::string_view label) const {
  auto it = group_index_.find(std::string(label));
  if (it == group_index_.end()) return std::nullopt;
  return it->second;
}

bool LabelVocabulary::operator==(const LabelVocabulary& other) const {
  if (labels_ != other.labels_ || groups_.size() != other.groups_.size()) return false;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].name != other.groups_[g].name || groups_[g].members != other.groups_[g].members) return false;
  }
  return true;
}

LabelVocabulary parse_vocabulary(std::string_view json_text, const std::string& source_name) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    // byte offset -> line for the message
    const std::size_t byte = std::min<std::size_t>(e.byte, json_text.size());
    const auto line = static_cast<std::size_t>(std::count(json_text.begin(), json_text.begin() + static_cast<std::ptrdiff_t>(byte), '\n')) + 1;
    throw DataError(at_line(source_name, line) + ": JSON parse error: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array()) {
    throw DataError(source_name + ": expected an object with a \"labels\" array");
  }

  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> seen;
  std::unordered_map<std::string, std::size_t> occurrences;
  for (const auto& item : doc["labels"]) {
    if (!item.is_string()) throw DataError(source_name + ": labels must be strings");
    const auto raw = item.get<std::string>();
    const auto literal = ordered_json(raw).dump();
    const std::size_t line = line_of_occurrence(json_text, literal, occurrences[literal]++);
    const std::string norm = normalize_label(raw);
    if (norm.empty()) throw DataError(at_line(source_name, line) + ": empty label");
    if (auto it = seen.find(norm); it != seen.end()) {
      throw DataError(at_line(source_name, line) + ": duplicate label '" + raw + "' (normalizes to '" + norm +
                      "', same as label #" + std::to_string(it->second + 1) + ")");
    }
    seen.emplace(norm, labels.size());
    labels.push_back(raw);
  }

  std::vector<LabelGroup> groups;
  if (doc.contains("groups") && !doc["groups"].is_null()) {
    if (!doc["groups"].is_object()) throw DataError(source_name + ": \"groups\" must be an object");
    for (const auto& [name, members] : doc["groups"].items()) {
      if (!members.is_array()) throw DataError(source_name + ": group '" + name + "' must be an array");
      LabelGroup g{name, {}};
      for (const auto& m : members) {
        if (!m.is_string()) throw DataError(source_name + ": group '" + name + "' members must be strings");
        const auto raw = m.get<std::string>();
        if (!seen.contains(normalize_label(raw))) {
          const auto literal = ordered_json(raw).dump();
          const std::size_t line = line_of_occurrence(json_text, literal, occurrences[literal]++);
          throw DataError(at_line(source_name, line) + ": group '" + name + "' references unknown label '" + raw + "'");
        }
        g.members.push_back(raw);
      }
      groups.push_back(std::move(g));
    }
  }
  try {
    return LabelVocabulary(std::move(labels), std::move(groups));
  } catch (const DataError& e) {
    throw DataError(source_name + ": " + e.what());
  }
}

LabelVocabulary load_vocabulary(const std::filesystem::path& path) {
  return parse_vocabulary(io::read_file(path), path.string());
}

std::string vocabulary_to_json(const LabelVocabulary& vocab) {
  ordered_json doc;
  doc["labels"] = vocab.labels();
  if (vocab.has_groups()) {
    ordered_json groups = ordered_json::object();
    for (const auto& g : vocab.groups()) groups[g.name] = g.members;
    doc["groups"] = std::move(groups);
  }
  return doc.dump(2) + "\n";
}

void save_vocabulary(const LabelVocabulary& vocab, const std::filesystem::path& path) {
  io::write_file(path, vocabulary_to_json(vocab));
}

std::optional<LabelVocabulary> builtin_vocabulary(std::string_view name) {
  if (name == "shaver135") return parse_vocabulary(detail::kShaver135Json, "builtin:shaver135");
  return std::nullopt;
}

std::vector<std::string> builtin_vocabulary_names() { return {"shaver135"}; }

LabelVocabulary resolve_vocabulary(const std::string& name_or_path) {
  if (auto v = builtin_vocabulary(name_or_path)) return *std::move(v);
  return load_vocabulary(name_or_path);
}

}  // namespace labeltree
