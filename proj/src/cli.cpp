#include "labeltree/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "labeltree/alignment.hpp"
#include "labeltree/bias.hpp"
#include "labeltree/bundle.hpp"
#include "labeltree/error.hpp"
#include "labeltree/export.hpp"
#include "labeltree/hierarchy.hpp"
#include "labeltree/io.hpp"
#include "labeltree/matching.hpp"
#include "labeltree/synth.hpp"

namespace labeltree::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kDefaultsFooter =
    "Defaults: threshold t = 0.3, top-k = 100 (clamped to the vocabulary size).\n"
    "Environment: CF_THREADS caps worker threads.";
constexpr const char* kLockName = ".labeltree.lock";
constexpr const char* kNeutralScope = "neutral";

struct UsageError : Error {
  using Error::Error;
};

unsigned worker_threads() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("CF_THREADS"); cap && *cap) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (*end != '\0' || v == 0) throw UsageError("CF_THREADS must be a positive integer");
    threads = std::min<unsigned>(threads, static_cast<unsigned>(v));
  }
  return threads;
}

std::string pid_suffix() { return std::to_string(static_cast<long>(::getpid())); }

// Collects outputs in a hidden staging directory inside `dir` and moves them
// into place only on commit(). The directory is locked for the lifetime of
// the object.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    lock_ = dir_ / kLockName;
    std::FILE* f = std::fopen(lock_.c_str(), "wx");
    if (!f) {
      throw UsageError("output directory " + dir_.string() + " is locked by another run (remove " + lock_.string() +
                       " if stale)");
    }
    std::fputs(pid_suffix().c_str(), f);
    std::fclose(f);
    staging_ = dir_ / (".staging-" + pid_suffix());
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  ~StagedOutput() {
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::remove(lock_, ec);
  }

  fs::path path(const std::string& relative) const {
    auto p = staging_ / relative;
    fs::create_directories(p.parent_path());
    return p;
  }

  void commit() {
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(staging_)) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& src : entries) {
      const auto dst = dir_ / src.filename();
      if (fs::is_directory(dst) && !fs::is_symlink(dst)) fs::remove_all(dst);
      fs::rename(src, dst);
    }
  }

 private:
  fs::path dir_;
  fs::path lock_;
  fs::path staging_;
};

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp-" + pid_suffix();
  try {
    io::write_file(tmp, contents);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void emit(const std::string& text, const std::string& out_file, std::ostream& out) {
  if (out_file.empty()) {
    out << text;
  } else {
    write_atomic(out_file, text);
  }
}

std::string scope_name(const std::optional<std::string>& persona) {
  if (!persona) return kNeutralScope;
  std::string s;
  for (unsigned char c : *persona) s.push_back(std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_');
  return s.empty() ? "_" : s;
}

// --persona NAME selects rows tagged NAME; "neutral" also matches untagged rows
// when no row carries that literal tag.
ProbabilityMatrixBundle select_scope(const ProbabilityMatrixBundle& bundle, const std::string& persona) {
  if (persona.empty()) return bundle;
  std::optional<std::string> key = persona;
  if (persona == kNeutralScope) {
    const auto all = personas(bundle);
    if (std::find(all.begin(), all.end(), key) == all.end()) key.reset();
  }
  auto selected = bundle.select_persona(key);
  if (selected.instances() == 0) throw DataError("no instances with persona '" + persona + "'");
  return selected;
}

std::size_t effective_top_k(std::size_t requested, std::size_t labels) {
  if (requested == 0) throw UsageError("--top-k must be >= 1");
  return std::min(requested, labels);
}

void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) throw UsageError("--threshold must satisfy 0 < t < 1");
}

ordered_json forest_metrics(const HierarchyForest& f) {
  ordered_json doc;
  doc["nodes"] = f.size();
  doc["edges"] = f.edge_count();
  doc["roots"] = f.roots().size();
  doc["total_path_length"] = total_path_length(f);
  doc["average_depth"] = average_depth(f);
  return doc;
}

MatchingMatrix matching_for(const ProbabilityMatrixBundle& bundle, std::size_t top_k) {
  const auto truncated = truncate_top_k(bundle, effective_top_k(top_k, bundle.labels()));
  return build_matching_matrix(truncated, worker_threads());
}

std::string dag_to_dot(const CandidateGraph& graph, const LabelVocabulary& vocab) {
  std::string out = "digraph hierarchy {\n  graph [rankdir=LR];\n";
  out += "  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    return q + "\"";
  };
  for (const auto& n : graph.nodes) out += "  " + quote(n) + " [fillcolor=" + quote(std::string(group_color(vocab, n))) + "];\n";
  for (const auto& e : graph.edges) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", e.confidence);
    out += "  " + quote(e.parent) + " -> " + quote(e.child) + " [label=" + quote(buf) + "];\n";
  }
  return out + "}\n";
}

// ---------------------------------------------------------------- commands

struct TreeOptions {
  std::string bundle;
  double threshold = kDefaultThreshold;
  std::size_t top_k = kDefaultTopK;
  std::string mode = "tree";
  std::string out = ".";
  std::string persona;
  bool save_matching = false;
};

int run_tree(const TreeOptions& o, std::ostream& out, std::ostream& err) {
  check_threshold(o.threshold);
  const auto bundle = select_scope(load_matrix_bundle(o.bundle), o.persona);
  const auto c = matching_for(bundle, o.top_k);
  const auto graph = build_candidate_graph(c, o.threshold);
  const auto forest = resolve_forest(graph.edges, graph.nodes, graph.excluded_zero_mass);

  StagedOutput staged(o.out);
  if (o.mode == "dag") {
    io::write_file(staged.path("forest.json"), candidate_graph_to_json(graph));
    io::write_file(staged.path("forest.dot"), dag_to_dot(graph, bundle.vocabulary()));
  } else {
    io::write_file(staged.path("forest.json"), forest_to_json(forest));
    io::write_file(staged.path("forest.dot"), to_dot(forest, bundle.vocabulary()));
  }
  io::write_file(staged.path("wheel.svg"), wheel_svg(forest, bundle.vocabulary()));
  if (o.save_matching) save_matching_matrix(c, staged.path("matching.csv"));
  staged.commit();

  if (!graph.excluded_zero_mass.empty()) {
    err << "note: " << graph.excluded_zero_mass.size() << " zero-mass label(s) excluded (see excluded_zero_mass)\n";
  }
  out << "nodes=" << forest.size() << " edges=" << (o.mode == "dag" ? graph.edges.size() : forest.edge_count())
      << " total_path_length=" << total_path_length(forest) << "\n";
  return kSuccess;
}

struct MetricsOptions {
  std::string forest;
  std::string compare;
  std::string out;
};

int run_metrics(const MetricsOptions& o, std::ostream& out) {
  const auto forest = load_forest(o.forest);
  auto doc = forest_metrics(forest);
  if (!o.compare.empty()) {
    const auto other = load_forest(o.compare);
    doc["compare"] = forest_metrics(other);
    doc["edge_difference"] = edge_difference(forest, other);
  }
  emit(doc.dump(2) + "\n", o.out, out);
  return kSuccess;
}

struct SweepOptions {
  std::string bundle;
  std::string thresholds = "0.1:0.9:0.1";
  std::size_t top_k = kDefaultTopK;
  std::string persona;
  std::string out;
};

int run_sweep(const SweepOptions& o, std::ostream& out) {
  const auto thresholds = parse_threshold_range(o.thresholds);
  const auto bundle = select_scope(load_matrix_bundle(o.bundle), o.persona);
  const auto c = matching_for(bundle, o.top_k);
  std::string csv = "threshold,total_path_length,average_depth,edge_count\n";
  for (double t : thresholds) {
    const auto forest = build_forest(c, t);
    csv += io::format_double(t) + "," + std::to_string(total_path_length(forest)) + "," +
           io::format_double(average_depth(forest)) + "," + std::to_string(forest.edge_count()) + "\n";
  }
  emit(csv, o.out, out);
  return kSuccess;
}

struct AlignOptions {
  std::string forest;
  std::string vocab;
  bool hops = false;
  bool wheel_ordinal = false;
  std::string out;
};

int run_align(const AlignOptions& o, std::ostream& out) {
  const auto forest = load_forest(o.forest);
  const auto vocab = resolve_vocabulary(o.vocab);
  std::vector<std::string> labels;
  for (const auto& n : forest.nodes()) {
    if (vocab.group_of(n)) labels.push_back(n);
  }
  const auto reference =
      o.wheel_ordinal ? wheel_position_distance_vector(vocab, labels) : group_distance_vector(vocab, labels);
  const auto inferred = o.hops ? hop_distance_vector(forest, labels) : tree_cluster_distance_vector(forest, labels);
  emit(pearson(reference, inferred).to_json(), o.out, out);
  return kSuccess;
}

struct BiasOptions {
  std::string bundle;
  std::string coarse;
  bool persona_split = false;
  std::string flow;
  double threshold = kDefaultThreshold;
  std::size_t top_k = kDefaultTopK;
  std::string out = ".";
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(normalize_label(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(normalize_label(cur));
  return out;
}

int run_bias(const BiasOptions& o, std::ostream& out) {
  check_threshold(o.threshold);
  const auto bundle = load_matrix_bundle(o.bundle);
  const auto& vocab = bundle.vocabulary();

  LabelVocabulary coarse_vocab = o.coarse.empty() ? vocab : resolve_vocabulary(o.coarse);
  {
    auto a = coarse_vocab.labels();
    auto b = vocab.labels();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw DataError("coarse vocabulary labels differ from the bundle vocabulary");
  }
  const auto map = CoarseMap::from_groups(coarse_vocab);
  std::vector<std::string> flows = split_list(o.flow);
  for (const auto& f : flows) {
    if (std::find(map.categories().begin(), map.categories().end(), f) == map.categories().end()) {
      throw UsageError("--flow category '" + f + "' is not a coarse category");
    }
  }

  struct Scope {
    std::string name;
    std::optional<std::string> persona;
    std::vector<std::string> preds;
    HierarchyForest forest;
  };
  std::vector<Scope> scopes;
  if (o.persona_split) {
    for (const auto& p : personas(bundle)) scopes.push_back({scope_name(p), p, {}, {}});
  } else {
    scopes.push_back({"all", std::nullopt, {}, {}});
  }
  std::set<std::string> names;
  for (const auto& s : scopes) {
    if (!names.insert(s.name).second) throw DataError("personas collide on directory name '" + s.name + "'");
  }

  StagedOutput staged(o.out);
  std::string accuracy_csv = "persona,n,fine_accuracy,coarse_accuracy,total_path_length,average_depth\n";
  for (auto& s : scopes) {
    const auto subset = o.persona_split ? bundle.select_persona(s.persona) : bundle;
    s.preds = predict_labels(subset);
    const auto truths = truth_labels(subset);
    const auto fine = confusion(s.preds, truths, vocab);
    const auto coarse = coarsen(fine, map);
    s.forest = build_forest(matching_for(subset, o.top_k), o.threshold);

    io::write_file(staged.path(s.name + "/confusion_fine.csv"), fine.to_csv());
    io::write_file(staged.path(s.name + "/confusion_coarse.csv"), coarse.to_csv());
    io::write_file(staged.path(s.name + "/fine.chord.json"), chord_json(fine));
    io::write_file(staged.path(s.name + "/coarse.chord.json"), chord_json(coarse));
    io::write_file(staged.path(s.name + "/forest.json"), forest_to_json(s.forest));
    if (!flows.empty()) {
      std::string json = "[\n";
      for (std::size_t i = 0; i < flows.size(); ++i) {
        json += flow_into(coarse, flows[i]).to_json() + (i + 1 < flows.size() ? ",\n" : "\n");
      }
      io::write_file(staged.path(s.name + "/flow.json"), json + "]\n");
    }
    accuracy_csv += io::csv_line({s.persona.value_or(s.name), std::to_string(subset.instances()),
                                  io::format_double(accuracy(fine)), io::format_double(accuracy(coarse)),
                                  std::to_string(total_path_length(s.forest)),
                                  io::format_double(average_depth(s.forest))});
    out << (s.persona ? *s.persona : s.name) << ": fine " << accuracy(fine) << ", coarse " << accuracy(coarse)
        << "\n";
  }
  io::write_file(staged.path("accuracy.csv"), accuracy_csv);

  if (scopes.size() > 1) {
    std::string pairs = "persona_a,persona_b,compared,different_predictions,different_edges\n";
    for (std::size_t i = 0; i < scopes.size(); ++i) {
      for (std::size_t j = i + 1; j < scopes.size(); ++j) {
        const auto& a = scopes[i];
        const auto& b = scopes[j];
        // Personas answer the same scenarios in the same order; otherwise the
        // prediction comparison is skipped.
        const bool aligned = a.preds.size() == b.preds.size();
        pairs += io::csv_line({a.persona.value_or(a.name), b.persona.value_or(b.name),
                               aligned ? std::to_string(a.preds.size()) : "0",
                               aligned ? std::to_string(prediction_difference(a.preds, b.preds)) : "",
                               std::to_string(edge_difference(a.forest, b.forest))});
      }
    }
    io::write_file(staged.path("persona_pairs.csv"), pairs);
  }
  staged.commit();
  return kSuccess;
}

struct SynthOptions {
  std::size_t nodes = 15;
  std::size_t depth = 3;
  std::size_t instances = 5000;
  double gamma = 0.5;
  double eps = 0.0;
  std::uint64_t seed = 7;
  bool gzip = false;
  std::string out;
};

int run_synth(const SynthOptions& o, std::ostream& out) {
  if (!(o.gamma > 0.0 && o.gamma < 1.0)) throw UsageError("--gamma must lie strictly between 0 and 1");
  if (!(o.eps >= 0.0)) throw UsageError("--eps must be >= 0");
  if (o.instances == 0) throw UsageError("--n must be >= 1");
  if (o.nodes == 0) throw UsageError("--nodes must be >= 1");
  if (o.depth == 0 && o.nodes > 1) throw UsageError("--depth 0 allows a single node");
  PlantedModel model{make_balanced_tree(o.nodes, o.depth), {}, o.gamma, o.eps, o.seed};
  const auto bundle = generate_bundle(model, o.instances);

  StagedOutput staged(o.out);
  const auto bundle_dir = staged.path("bundle");
  save_bundle(bundle, bundle_dir, o.gzip);
  io::write_file(staged.path("truth.json"), forest_to_json(model.truth));
  staged.commit();
  out << "wrote " << bundle.instances() << " instances over " << bundle.labels() << " labels to "
      << (fs::path(o.out) / "bundle").string() << "\n";
  return kSuccess;
}

struct CorrelateOptions {
  std::string dir;
  std::string metric = "total_path_length";
  std::string accuracy = "fine";
  std::string out;
};

int run_correlate(const CorrelateOptions& o, std::ostream& out) {
  const auto metric = parse_geometry_metric(o.metric);
  if (o.accuracy != "fine" && o.accuracy != "coarse") throw UsageError("--accuracy must be fine or coarse");
  const fs::path dir = o.dir;
  const auto rows = io::parse_csv(io::read_file(dir / "accuracy.csv"), "accuracy.csv");
  if (rows.empty()) throw DataError("accuracy.csv is empty");
  const auto& header = rows.front().fields;
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("accuracy.csv lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t persona_col = column("persona");
  const std::size_t acc_col = column(o.accuracy + "_accuracy");

  std::vector<HierarchyForest> forests;
  std::vector<double> accuracies;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size()) throw DataError("accuracy.csv:" + std::to_string(rows[r].line) + ": wrong field count");
    const std::string& persona = f[persona_col];
    const std::string scope = persona == "all" ? "all" : scope_name(persona);
    forests.push_back(load_forest((dir / scope / "forest.json").string()));
    accuracies.push_back(io::parse_double(f[acc_col], "accuracy.csv:" + std::to_string(rows[r].line)));
  }
  emit(geometry_accuracy_correlation(forests, accuracies, metric).to_json(), o.out, out);
  return kSuccess;
}

struct ExportOptions {
  std::string forest;
  std::string vocab;
  std::string out = ".";
  std::string name = "hierarchy";
};

int run_export(const ExportOptions& o, std::ostream& out) {
  const auto forest = load_forest(o.forest);
  const LabelVocabulary vocab = o.vocab.empty() ? LabelVocabulary(forest.nodes()) : resolve_vocabulary(o.vocab);
  StagedOutput staged(o.out);
  io::write_file(staged.path(o.name + ".dot"), to_dot(forest, vocab));
  io::write_file(staged.path(o.name + ".svg"), wheel_svg(forest, vocab));
  staged.commit();
  out << "wrote " << o.name << ".dot and " << o.name << ".svg\n";
  return kSuccess;
}

}  // namespace

std::vector<double> parse_threshold_range(const std::string& range) {
  const auto first = range.find(':');
  const auto second = first == std::string::npos ? std::string::npos : range.find(':', first + 1);
  if (second == std::string::npos || range.find(':', second + 1) != std::string::npos) {
    throw UsageError("threshold range must look like start:stop:step");
  }
  double start = 0.0, stop = 0.0, step = 0.0;
  try {
    start = io::parse_double(range.substr(0, first), "--thresholds");
    stop = io::parse_double(range.substr(first + 1, second - first - 1), "--thresholds");
    step = io::parse_double(range.substr(second + 1), "--thresholds");
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  if (!(step > 0.0)) throw UsageError("threshold step must be > 0");
  if (!(start > 0.0 && stop < 1.0 && start <= stop + 1e-9)) {
    throw UsageError("thresholds must satisfy 0 < start <= stop < 1");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    // Round to 12 significant digits so 0.1 + 2 * 0.1 prints and behaves as 0.3.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", start + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Infer label hierarchies from classifier probability outputs and analyse them."};
  app.name("labeltree");
  app.footer(kDefaultsFooter);
  app.require_subcommand(1);

  auto add_sub = [&](const char* name, const char* desc) {
    auto* sub = app.add_subcommand(name, desc);
    sub->footer(kDefaultsFooter);
    return sub;
  };

  std::string validate_dir;
  auto* validate = add_sub("validate", "Validate a bundle directory and print a report.");
  validate->add_option("bundle", validate_dir, "Bundle directory")->required();

  TreeOptions tree_opts;
  auto* tree = add_sub("tree", "Build the label hierarchy of a bundle (forest.json, forest.dot, wheel.svg).");
  tree->add_option("bundle", tree_opts.bundle, "Bundle directory")->required();
  tree->add_option("--threshold,-t", tree_opts.threshold, "Edge threshold t, 0 < t < 1")->capture_default_str();
  tree->add_option("--top-k,-k", tree_opts.top_k, "Keep the k most likely labels per instance")->capture_default_str();
  tree->add_option("--mode", tree_opts.mode, "tree: resolved forest; dag: all candidate edges")
      ->check(CLI::IsMember({"tree", "dag"}))
      ->capture_default_str();
  tree->add_option("--out,-o", tree_opts.out, "Output directory")->capture_default_str();
  tree->add_option("--persona", tree_opts.persona, "Only instances with this persona ('neutral' = untagged)");
  tree->add_flag("--save-matching", tree_opts.save_matching, "Also write matching.csv");

  MetricsOptions metrics_opts;
  auto* metrics = add_sub("metrics", "Geometry metrics of a forest, optionally compared with another.");
  metrics->add_option("forest", metrics_opts.forest, "forest.json")->required();
  metrics->add_option("--compare", metrics_opts.compare, "Second forest.json for edge difference");
  metrics->add_option("--out,-o", metrics_opts.out, "Write JSON here instead of standard output");

  SweepOptions sweep_opts;
  auto* sweep = add_sub("sweep", "Forest metrics across a range of thresholds (CSV).");
  sweep->add_option("bundle", sweep_opts.bundle, "Bundle directory")->required();
  sweep->add_option("--thresholds", sweep_opts.thresholds, "start:stop:step, both ends inclusive")
      ->capture_default_str();
  sweep->add_option("--top-k,-k", sweep_opts.top_k, "Keep the k most likely labels per instance")->capture_default_str();
  sweep->add_option("--persona", sweep_opts.persona, "Only instances with this persona");
  sweep->add_option("--out,-o", sweep_opts.out, "Write CSV here instead of standard output");

  AlignOptions align_opts;
  auto* align = add_sub("align", "Correlate forest distances with a reference grouping (JSON).");
  align->add_option("forest", align_opts.forest, "forest.json")->required();
  align->add_option("vocab", align_opts.vocab, "Vocabulary with groups (file or builtin name)")->required();
  align->add_flag("--hops", align_opts.hops, "Use tree hop counts instead of cluster membership");
  align->add_flag("--wheel-ordinal", align_opts.wheel_ordinal, "Use circular group-position gaps as reference");
  align->add_option("--out,-o", align_opts.out, "Write JSON here instead of standard output");

  BiasOptions bias_opts;
  auto* bias = add_sub("bias", "Confusion, accuracy, flow and persona comparisons.");
  bias->add_option("bundle", bias_opts.bundle, "Bundle directory with truth labels")->required();
  bias->add_option("--coarse", bias_opts.coarse, "Coarse map: builtin name (shaver135) or vocabulary file");
  bias->add_flag("--persona-split", bias_opts.persona_split, "One analysis per persona");
  bias->add_option("--flow", bias_opts.flow, "Comma-separated coarse targets, e.g. fear,anger");
  bias->add_option("--threshold,-t", bias_opts.threshold, "Edge threshold for per-persona forests")
      ->capture_default_str();
  bias->add_option("--top-k,-k", bias_opts.top_k, "Top-k truncation for per-persona forests")->capture_default_str();
  bias->add_option("--out,-o", bias_opts.out, "Output directory")->capture_default_str();

  SynthOptions synth_opts;
  auto* synth = add_sub("synth", "Generate a bundle from a planted hierarchy.");
  synth->add_option("--nodes", synth_opts.nodes, "Number of labels")->capture_default_str();
  synth->add_option("--depth", synth_opts.depth, "Levels below the root")->capture_default_str();
  synth->add_option("--n", synth_opts.instances, "Number of instances")->capture_default_str();
  synth->add_option("--gamma", synth_opts.gamma, "Ancestor decay per level, 0 < gamma < 1")->capture_default_str();
  synth->add_option("--eps", synth_opts.eps, "Uniform noise floor")->capture_default_str();
  synth->add_option("--seed", synth_opts.seed, "SplitMix64 seed")->capture_default_str();
  synth->add_flag("--gzip", synth_opts.gzip, "Write matrix.csv.gz");
  synth->add_option("--out,-o", synth_opts.out, "Output directory")->required();

  CorrelateOptions corr_opts;
  auto* correlate = add_sub("correlate-geometry", "Correlate per-persona forest geometry with accuracy.");
  correlate->add_option("dir", corr_opts.dir, "Output directory of 'bias --persona-split'")->required();
  correlate->add_option("--metric", corr_opts.metric, "total_path_length or average_depth")
      ->check(CLI::IsMember({"total_path_length", "average_depth"}))
      ->capture_default_str();
  correlate->add_option("--accuracy", corr_opts.accuracy, "fine or coarse")
      ->check(CLI::IsMember({"fine", "coarse"}))
      ->capture_default_str();
  correlate->add_option("--out,-o", corr_opts.out, "Write JSON here instead of standard output");

  ExportOptions export_opts;
  auto* exporter = add_sub("export", "Render a forest.json as DOT and wheel SVG.");
  exporter->add_option("forest", export_opts.forest, "forest.json")->required();
  exporter->add_option("--vocab", export_opts.vocab, "Vocabulary for group colours (file or builtin name)");
  exporter->add_option("--name", export_opts.name, "Output file stem")->capture_default_str();
  exporter->add_option("--out,-o", export_opts.out, "Output directory")->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("labeltree");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'labeltree --help' for usage\n";
    return kUsageError;
  }

  try {
    if (*validate) {
      const auto report = validate_bundle(validate_dir);
      out << report.to_json();
      return report.passed() ? kSuccess : kDataError;
    }
    if (*tree) return run_tree(tree_opts, out, err);
    if (*metrics) return run_metrics(metrics_opts, out);
    if (*sweep) return run_sweep(sweep_opts, out);
    if (*align) return run_align(align_opts, out);
    if (*bias) return run_bias(bias_opts, out);
    if (*synth) return run_synth(synth_opts, out);
    if (*correlate) return run_correlate(corr_opts, out);
    if (*exporter) return run_export(export_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  err << "error: no subcommand\n";
  return kUsageError;
}

}  // namespace labeltree::cli
