#pragma once

// JSON, DOT and plain-text renderings of trees and reports.
//
// Every JSON document is {"schema_version": "1.0", "type": ..., "payload": ...}
// with keys in a fixed order; durations are exact "num/den" strings.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "skdiff/analysis.hpp"
#include "skdiff/corpus.hpp"
#include "skdiff/difftree.hpp"
#include "skdiff/error.hpp"
#include "skdiff/skreduce.hpp"

namespace skdiff {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kAbsentFeature = "–";

inline Json json_document(std::string_view type, Json payload) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["type"] = type;
  doc["payload"] = std::move(payload);
  return doc;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Sk trees

inline Json to_json(const SkNode& n) {
  Json j;
  j["pitch"] = {{"name", n.pitch.name()}, {"midi", n.pitch.midi()}};
  j["onset"] = n.onset.to_string();
  j["duration"] = n.duration.to_string();
  j["expansion"] = n.expansion_label();
  j["level"] = n.level;
  j["children"] = Json::array();
  for (const SkNode& c : n.children) j["children"].push_back(to_json(c));
  return j;
}

inline Json to_json(const SkTree& t) {
  Json j;
  j["segment"] = t.segment_index + 1;
  j["levels"] = t.levels;
  j["grid_unit"] = t.grid_unit.to_string();
  j["root"] = to_json(t.root);
  return j;
}

inline std::string export_sk_tree_json(const SkTree& t) { return dump(json_document("sk_tree", to_json(t))); }

inline std::string export_sk_trees_json(const std::vector<SkTree>& trees) {
  Json list = Json::array();
  for (const SkTree& t : trees) list.push_back(to_json(t));
  return dump(json_document("sk_tree", std::move(list)));
}

namespace detail {

inline const Json& payload_of(const Json& doc, std::string_view type) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("payload")) {
    throw ParseError("not a skdiff JSON document");
  }
  if (doc.at("schema_version").get<std::string>().substr(0, 2) != "1.") {
    throw ParseError("unsupported schema_version " + doc.at("schema_version").get<std::string>());
  }
  if (doc.at("type").get<std::string>() != type) {
    throw ParseError("expected a " + std::string(type) + " document, got " + doc.at("type").get<std::string>());
  }
  return doc.at("payload");
}

inline SkNode sk_node_from_json(const Json& j) {
  SkNode n;
  n.pitch = Pitch::parse(j.at("pitch").at("name").get<std::string>());
  if (n.pitch.midi() != j.at("pitch").at("midi").get<int>()) throw ParseError("pitch name and midi disagree");
  n.onset = Duration::parse(j.at("onset").get<std::string>());
  n.duration = Duration::parse(j.at("duration").get<std::string>());
  n.level = j.at("level").get<int>();
  for (const Json& c : j.at("children")) n.children.push_back(sk_node_from_json(c));
  const std::string label = j.at("expansion").get<std::string>();
  if (label == "LEAF") {
    n.expansion = Expansion::leaf;
  } else if (label == "L") {
    n.expansion = Expansion::left;
  } else if (label == "R") {
    n.expansion = Expansion::right;
    n.survivor = static_cast<int>(n.children.size()) - 1;
  } else if (label.size() == 2 && label[0] == 'T' && label[1] >= '0' && label[1] <= '2') {
    n.expansion = Expansion::ternary;
    n.survivor = label[1] - '0';
  } else {
    throw ParseError("invalid expansion '" + label + "'");
  }
  if ((n.expansion == Expansion::leaf) != n.children.empty()) throw ParseError("expansion does not match children");
  return n;
}

inline SkTree sk_tree_from_json(const Json& j) {
  return {sk_node_from_json(j.at("root")), j.at("segment").get<int>() - 1, j.at("levels").get<int>(),
          Duration::parse(j.at("grid_unit").get<std::string>())};
}

template <typename F>
auto with_json_errors(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace detail

inline SkTree import_sk_tree_json(std::string_view text) {
  return detail::with_json_errors([&] {
    const Json doc = Json::parse(text);
    return detail::sk_tree_from_json(detail::payload_of(doc, "sk_tree"));
  });
}

inline std::vector<SkTree> import_sk_trees_json(std::string_view text) {
  return detail::with_json_errors([&] {
    const Json doc = Json::parse(text);
    const Json& payload = detail::payload_of(doc, "sk_tree");
    std::vector<SkTree> out;
    if (payload.is_array()) {
      for (const Json& t : payload) out.push_back(detail::sk_tree_from_json(t));
    } else {
      out.push_back(detail::sk_tree_from_json(payload));
    }
    return out;
  });
}

// ---------------------------------------------------------------------------
// Diff trees

inline Json to_json(const DiffNode& n) {
  Json j;
  j["sk"] = to_string(n.features.sk);
  j["ch"] = to_string(n.features.ch);
  j["dir"] = n.features.dir ? Json(to_string(*n.features.dir)) : Json(nullptr);
  j["int"] = n.features.int_width ? Json(to_string(*n.features.int_width)) : Json(nullptr);
  j["left_ref"] = n.left_ref;
  j["right_ref"] = n.right_ref;
  j["children"] = Json::array();
  for (const DiffNode& c : n.children) j["children"].push_back(to_json(c));
  return j;
}

inline Json to_json(const DiffTree& d) {
  Json j;
  j["left_segment"] = d.left_segment + 1;
  j["right_segment"] = d.right_segment + 1;
  j["root"] = to_json(d.root);
  j["extensions"] = {{"root_pitch_offset", d.root_pitch_offset}};
  return j;
}

inline std::string export_diff_tree_json(const DiffTree& d) { return dump(json_document("diff_tree", to_json(d))); }

namespace detail {

template <typename E>
E feature_from(const Json& j, std::initializer_list<std::pair<std::string_view, E>> table) {
  const std::string s = j.get<std::string>();
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ParseError("invalid feature value '" + s + "'");
}

inline DiffNode diff_node_from_json(const Json& j) {
  DiffNode n;
  n.features.sk = feature_from<SkFeature>(j.at("sk"), {{"same", SkFeature::same}, {"diff", SkFeature::diff}});
  n.features.ch = feature_from<ChFeature>(
      j.at("ch"), {{"same", ChFeature::same}, {"more", ChFeature::more}, {"less", ChFeature::less}});
  if (!j.at("dir").is_null()) {
    n.features.dir = feature_from<DirFeature>(j.at("dir"), {{"same", DirFeature::same}, {"diff", DirFeature::diff}});
  }
  if (!j.at("int").is_null()) {
    n.features.int_width = feature_from<IntFeature>(
        j.at("int"), {{"same", IntFeature::same}, {"narrow", IntFeature::narrow}, {"wide", IntFeature::wide}});
  }
  n.left_ref = j.at("left_ref").get<TreePath>();
  n.right_ref = j.at("right_ref").get<TreePath>();
  for (const Json& c : j.at("children")) n.children.push_back(diff_node_from_json(c));
  return n;
}

}  // namespace detail

inline DiffTree import_diff_tree_json(std::string_view text) {
  return detail::with_json_errors([&] {
    const Json doc = Json::parse(text);
    const Json& p = detail::payload_of(doc, "diff_tree");
    return DiffTree{detail::diff_node_from_json(p.at("root")), p.at("left_segment").get<int>() - 1,
                    p.at("right_segment").get<int>() - 1, p.at("extensions").at("root_pitch_offset").get<int>()};
  });
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const FeatureTally& t) {
  return {
      {"nodes", t.nodes},
      {"leaves", t.leaves},
      {"differing", t.differing},
      {"sk", {{"same", t.sk_same}, {"diff", t.sk_diff}}},
      {"ch", {{"same", t.ch_same}, {"more", t.ch_more}, {"less", t.ch_less}}},
      {"dir", {{"same", t.dir_same}, {"diff", t.dir_diff}, {"absent", t.dir_absent}}},
      {"int", {{"same", t.int_same}, {"narrow", t.int_narrow}, {"wide", t.int_wide}, {"absent", t.int_absent}}},
  };
}

inline Json to_json(const RelationLabel& l) {
  Json j;
  j["kind"] = to_string(l.kind);
  j["extension"] = l.is_extension();
  j["depth"] = l.depth;
  j["top_levels"] = l.top_levels;
  j["first_diff_level"] = l.first_diff_level < 0 ? Json(nullptr) : Json(l.first_diff_level + 1);
  j["root_pitch_offset"] = l.root_pitch_offset;
  j["per_level"] = Json::array();
  for (const FeatureTally& t : l.per_level) j["per_level"].push_back(to_json(t));
  j["total"] = to_json(l.total);
  return j;
}

inline Json to_json(const PairwiseMatrix& m, const StructureReport& r) {
  Json j;
  j["piece"] = m.piece_id;
  j["segment_count"] = m.segment_count;
  j["segments"] = m.segments;
  j["pair_count"] = m.diffs.size();
  j["pairs"] = Json::array();
  for (const PairResult& pr : r.pairs) {
    Json p;
    p["left"] = pr.pair.first;
    p["right"] = pr.pair.second;
    p["label"] = to_json(pr.label);
    p["diff_tree"] = to_json(m.diffs.at(pr.pair));
    j["pairs"].push_back(std::move(p));
  }
  j["skipped"] = Json::array();
  for (const SegmentPair& s : m.skipped) j["skipped"].push_back({s.first, s.second});
  j["groups"] = Json::array();
  for (const SegmentGroup& g : r.groups) {
    j["groups"].push_back({{"members", g.members}, {"variants", g.variants}, {"transposed", g.transposed}});
  }
  j["phrase_boundaries"] = r.phrase_boundaries;
  j["kind_counts"] = Json::object();
  for (const auto& [kind, count] : r.kind_counts) j["kind_counts"][std::string(to_string(kind))] = count;
  j["level_summaries"] = Json::array();
  for (const FeatureTally& t : r.level_summaries) j["level_summaries"].push_back(to_json(t));
  j["warnings"] = r.warnings;
  return j;
}

inline std::string export_pairwise_report_json(const PairwiseMatrix& m, const StructureReport& r) {
  return dump(json_document("pairwise_report", to_json(m, r)));
}

inline Json to_json(const ValidationReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["complete"] = r.complete;
  j["present"] = r.present;
  j["skipped"] = r.skipped;
  j["failed"] = r.failed;
  j["pieces"] = Json::array();
  for (const PieceValidation& p : r.pieces) {
    Json pj;
    pj["number"] = p.number;
    pj["numeral"] = p.numeral;
    pj["present"] = p.present;
    pj["checks"] = Json::array();
    for (const CheckResult& c : p.checks) {
      pj["checks"].push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
    }
    j["pieces"].push_back(std::move(pj));
  }
  j["tallies"] = Json::array();
  for (const AggregateTally& t : r.tallies) {
    j["tallies"].push_back({{"claim", t.claim}, {"expected", t.expected}, {"observed", t.observed}, {"measured", t.measured}});
  }
  return j;
}

inline std::string export_validation_report_json(const ValidationReport& r) {
  return dump(json_document("validation_report", to_json(r)));
}

// ---------------------------------------------------------------------------
// DOT

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string feature_label(const DiffFeatures& f) {
  return "Sk: " + std::string(to_string(f.sk)) + "\\nCh: " + std::string(to_string(f.ch)) + "\\nDir: " +
         std::string(f.dir ? to_string(*f.dir) : kAbsentFeature) + "\\nInt: " +
         std::string(f.int_width ? to_string(*f.int_width) : kAbsentFeature);
}

/// Emits nodes and edges of a tree; `depth` is 1 at the root.
template <typename Node>
void dot_tree(std::ostream& out, const Node& n, const std::string& prefix, int& counter, int depth, int max_depth,
              const std::function<std::string(const Node&)>& label, std::string_view indent) {
  const std::string id = prefix + std::to_string(counter++);
  out << indent << id << " [label=\"" << label(n) << "\"];\n";
  if (max_depth > 0 && depth >= max_depth) return;
  for (const Node& c : n.children) {
    const std::string child = prefix + std::to_string(counter);
    dot_tree(out, c, prefix, counter, depth + 1, max_depth, label, indent);
    out << indent << id << " -> " << child << ";\n";
  }
}

}  // namespace detail

/// max_depth <= 0 keeps every level; otherwise levels below max_depth are omitted.
inline std::string export_diff_tree_dot(const DiffTree& d, int max_depth = 0) {
  std::ostringstream out;
  out << "digraph diff_tree {\n";
  out << "  label=\"segments " << d.left_segment + 1 << " - " << d.right_segment + 1 << "\";\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  int counter = 0;
  std::function<std::string(const DiffNode&)> label = [](const DiffNode& n) { return detail::feature_label(n.features); };
  detail::dot_tree(out, d.root, "n", counter, 1, max_depth, label, "  ");
  out << "}\n";
  return out.str();
}

inline std::string export_sk_tree_dot(const SkTree& t, int max_depth = 0) {
  std::ostringstream out;
  out << "digraph sk_tree {\n";
  out << "  label=\"segment " << t.segment_index + 1 << "\";\n";
  out << "  node [shape=ellipse, fontname=\"Helvetica\"];\n";
  int counter = 0;
  std::function<std::string(const SkNode&)> label = [](const SkNode& n) {
    return detail::dot_escape(n.pitch.name()) + "\\n" + n.expansion_label();
  };
  detail::dot_tree(out, t.root, "n", counter, 1, max_depth, label, "  ");
  out << "}\n";
  return out.str();
}

inline std::string export_sk_trees_dot(const std::vector<SkTree>& trees, int max_depth = 0) {
  std::ostringstream out;
  out << "digraph sk_trees {\n";
  out << "  node [shape=ellipse, fontname=\"Helvetica\"];\n";
  std::function<std::string(const SkNode&)> label = [](const SkNode& n) {
    return detail::dot_escape(n.pitch.name()) + "\\n" + n.expansion_label();
  };
  for (const SkTree& t : trees) {
    const std::string prefix = "s" + std::to_string(t.segment_index + 1) + "_";
    out << "  subgraph cluster_" << t.segment_index + 1 << " {\n";
    out << "    label=\"segment " << t.segment_index + 1 << "\";\n";
    int counter = 0;
    detail::dot_tree(out, t.root, prefix, counter, 1, max_depth, label, "    ");
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

inline std::string export_pairwise_dot(const PairwiseMatrix& m, int max_depth = 0) {
  std::ostringstream out;
  out << "digraph pairwise {\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  std::function<std::string(const DiffNode&)> label = [](const DiffNode& n) { return detail::feature_label(n.features); };
  for (const auto& [pair, diff] : m.diffs) {
    const std::string tag = std::to_string(pair.first) + "_" + std::to_string(pair.second);
    out << "  subgraph cluster_" << tag << " {\n";
    out << "    label=\"segments " << pair.first << " - " << pair.second << "\";\n";
    int counter = 0;
    detail::dot_tree(out, diff.root, "p" + tag + "_", counter, 1, max_depth, label, "    ");
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Text

namespace detail {

inline void text_sk(std::ostream& out, const SkNode& n, int depth) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.pitch.name() << " @" << n.onset.to_string()
      << " +" << n.duration.to_string() << " " << n.expansion_label() << "\n";
  for (const SkNode& c : n.children) text_sk(out, c, depth + 1);
}

inline std::string text_features(const DiffFeatures& f) {
  return "Sk " + std::string(to_string(f.sk)) + ", Ch " + std::string(to_string(f.ch)) + ", Dir " +
         std::string(f.dir ? to_string(*f.dir) : kAbsentFeature) + ", Int " +
         std::string(f.int_width ? to_string(*f.int_width) : kAbsentFeature);
}

inline void text_diff(std::ostream& out, const DiffNode& n, int depth, int max_depth) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << text_features(n.features) << "\n";
  if (max_depth > 0 && depth + 1 >= max_depth) return;
  for (const DiffNode& c : n.children) text_diff(out, c, depth + 1, max_depth);
}

inline std::string join(const std::vector<int>& v, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(sep) : "") + std::to_string(v[i]);
  return out;
}

}  // namespace detail

inline std::string export_sk_tree_text(const SkTree& t) {
  std::ostringstream out;
  out << "segment " << t.segment_index + 1 << " (levels " << t.levels << ", grid " << t.grid_unit.to_string() << ")\n";
  detail::text_sk(out, t.root, 1);
  return out.str();
}

inline std::string export_diff_tree_text(const DiffTree& d, int max_depth = 0) {
  std::ostringstream out;
  out << "segments " << d.left_segment + 1 << " - " << d.right_segment + 1 << " (root pitch offset "
      << d.root_pitch_offset << ")\n";
  detail::text_diff(out, d.root, 1, max_depth);
  return out.str();
}

inline std::string export_pairwise_report_text(const PairwiseMatrix& m, const StructureReport& r) {
  std::ostringstream out;
  if (!m.piece_id.empty()) out << "piece " << m.piece_id << "\n";
  out << m.segment_count << " segments, " << m.diffs.size() << " pairs\n\n";
  for (const PairResult& pr : r.pairs) {
    const RelationLabel& l = pr.label;
    out << pr.pair.first << "-" << pr.pair.second << "  " << to_string(l.kind);
    if (l.is_extension()) out << " (extension)";
    if (l.root_pitch_offset != 0) out << "  offset " << (l.root_pitch_offset > 0 ? "+" : "") << l.root_pitch_offset;
    out << "  depth " << l.depth;
    if (l.first_diff_level >= 0) out << "  first difference at level " << l.first_diff_level + 1;
    out << "\n";
    const DiffFeatures& f = m.diffs.at(pr.pair).root.features;
    out << "    root: " << detail::text_features(f) << "\n";
  }
  for (const SegmentPair& s : m.skipped) out << s.first << "-" << s.second << "  skipped (unequal span)\n";

  out << "\ngroups:\n";
  for (const SegmentGroup& g : r.groups) {
    out << "  {" << detail::join(g.members) << "}";
    if (!g.variants.empty()) out << " variants {" << detail::join(g.variants) << "}";
    if (g.transposed) out << " transposed";
    out << "\n";
  }
  out << "phrase boundaries: " << (r.phrase_boundaries.empty() ? "none" : detail::join(r.phrase_boundaries, ", "))
      << "\n";

  out << "\nper-level differences (nodes, Sk diff, Ch more/less, Dir diff, Int narrow/wide):\n";
  for (std::size_t i = 0; i < r.level_summaries.size(); ++i) {
    const FeatureTally& t = r.level_summaries[i];
    out << "  level " << i + 1 << ": " << t.nodes << " nodes, " << t.sk_diff << ", " << t.ch_more << "/" << t.ch_less
        << ", " << t.dir_diff << ", " << t.int_narrow << "/" << t.int_wide << "\n";
  }
  for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

inline std::string export_validation_report_text(const ValidationReport& r) {
  std::ostringstream out;
  for (const PieceValidation& p : r.pieces) {
    out << p.numeral << ":";
    if (!p.present) {
      out << " skipped (file not found)\n";
      continue;
    }
    out << (p.failed() ? " FAIL" : " ok") << "\n";
    for (const CheckResult& c : p.checks) out << "  " << c.name << ": " << to_string(c.status) << " (" << c.detail << ")\n";
  }
  out << "\n" << r.present << " present, " << r.skipped << " skipped, " << r.failed << " failed\n";
  for (const AggregateTally& t : r.tallies) {
    out << "  " << t.claim << ": expected " << t.expected;
    if (t.measured) out << ", observed " << t.observed << (r.complete ? "" : " (partial corpus)");
    else out << " (manifest only)";
    out << "\n";
  }
  return out.str();
}

}  // namespace skdiff
