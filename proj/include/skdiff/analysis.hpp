#pragma once

// Forward pairwise comparison of a piece's segments and classification of the
// resulting diff trees into repetition, transposition and variation.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skdiff/difftree.hpp"
#include "skdiff/error.hpp"
#include "skdiff/segmenter.hpp"
#include "skdiff/skreduce.hpp"

namespace skdiff {

enum class RelationKind { exact_repetition, transposition, contour_match, variation, unrelated };

inline std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::exact_repetition: return "exact_repetition";
    case RelationKind::transposition: return "transposition";
    case RelationKind::contour_match: return "contour_match";
    case RelationKind::variation: return "variation";
    case RelationKind::unrelated: return "unrelated";
  }
  return "unrelated";
}

struct RelationLabel {
  RelationKind kind = RelationKind::unrelated;
  int depth = 0;
  int top_levels = 0;             // levels that had to agree for a variation
  int first_diff_level = -1;      // 0 = root level; -1 when every node agrees
  int root_pitch_offset = 0;
  std::vector<FeatureTally> per_level;
  FeatureTally total;

  /// contour_match is not one of the base relation kinds.
  bool is_extension() const { return kind == RelationKind::contour_match; }
};

struct ClassifyOptions {
  /// Levels from the root that must agree for a variation; negative selects
  /// the levels strictly above the midpoint depth.
  int top_levels = -1;
};

namespace detail {

inline bool everywhere(const DiffNode& n, auto pred) {
  if (!pred(n.features)) return false;
  return std::all_of(n.children.begin(), n.children.end(), [&](const DiffNode& c) { return everywhere(c, pred); });
}

}  // namespace detail

/// Precedence: exact repetition, transposition, contour match, variation, unrelated.
inline RelationLabel classify(const DiffTree& d, const ClassifyOptions& options = {}) {
  const DiffSummary summary = diff_depth_and_counts(d);
  RelationLabel label;
  label.depth = summary.depth;
  label.per_level = summary.per_level;
  label.total = summary.total;
  label.root_pitch_offset = d.root_pitch_offset;
  for (std::size_t i = 0; i < summary.per_level.size(); ++i) {
    if (summary.per_level[i].differing > 0) {
      label.first_diff_level = static_cast<int>(i);
      break;
    }
  }
  label.top_levels = options.top_levels >= 0 ? std::min(options.top_levels, label.depth) : label.depth / 2;

  if (label.first_diff_level < 0) {
    label.kind = d.root_pitch_offset == 0 ? RelationKind::exact_repetition : RelationKind::transposition;
    return label;
  }
  const bool contour = detail::everywhere(d.root, [](const DiffFeatures& f) {
    return f.sk == SkFeature::same && f.ch == ChFeature::same && f.dir.value_or(DirFeature::same) == DirFeature::same;
  });
  if (contour) {
    label.kind = RelationKind::contour_match;
  } else if (label.top_levels > 0 && label.first_diff_level >= label.top_levels) {
    label.kind = RelationKind::variation;
  } else {
    label.kind = RelationKind::unrelated;
  }
  return label;
}

// ---------------------------------------------------------------------------
// Pairwise matrix

enum class PairPreset { forward, adjacent, figure2 };

inline std::string_view to_string(PairPreset p) {
  switch (p) {
    case PairPreset::forward: return "forward";
    case PairPreset::adjacent: return "adjacent";
    case PairPreset::figure2: return "figure2";
  }
  return "forward";
}

inline std::optional<PairPreset> parse_pair_preset(std::string_view s) {
  if (s == "forward") return PairPreset::forward;
  if (s == "adjacent") return PairPreset::adjacent;
  if (s == "figure2") return PairPreset::figure2;
  return std::nullopt;
}

using SegmentPair = std::pair<int, int>;  // 1-based, first < second

/// Pairs of the preset over segment numbers 1..n, ascending.
inline std::vector<SegmentPair> preset_pairs(PairPreset preset, int n) {
  std::set<SegmentPair> out;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (preset == PairPreset::forward || j == i + 1) out.insert({i, j});
    }
  }
  if (preset == PairPreset::figure2) {
    for (SegmentPair p : {SegmentPair{1, 3}, SegmentPair{1, 5}, SegmentPair{2, 4}, SegmentPair{6, 8}}) {
      if (p.second <= n) out.insert(p);
    }
  }
  return {out.begin(), out.end()};
}

struct AnalysisOptions {
  PairPreset pairs = PairPreset::forward;
  /// Section lengths in bars; when non-empty, only pairs inside one section are compared.
  std::vector<int> section_bars;
  bool include_partial = false;
};

struct PairwiseMatrix {
  std::string piece_id;
  int segment_count = 0;                 // segments entering the comparison
  std::vector<int> segments;             // their 1-based numbers, ascending
  std::vector<SkTree> trees;             // parallel to `segments`
  std::map<SegmentPair, DiffTree> diffs;
  std::vector<SegmentPair> skipped;      // requested pairs of unequal span

  const SkTree& tree(int number) const {
    const auto it = std::find(segments.begin(), segments.end(), number);
    if (it == segments.end()) throw Error("segment " + std::to_string(number) + " is not part of the analysis");
    return trees[static_cast<std::size_t>(it - segments.begin())];
  }
};

namespace detail {

inline int section_of(int segment_index, int segment_bars, const std::vector<int>& section_bars) {
  const int start_bar = segment_index * segment_bars;
  int acc = 0;
  for (std::size_t i = 0; i < section_bars.size(); ++i) {
    acc += section_bars[i];
    if (start_bar < acc) return static_cast<int>(i);
  }
  return static_cast<int>(section_bars.size());
}

}  // namespace detail

/// Builds one tree per segment, then a diff tree for every selected forward pair.
/// Partial segments are left out unless requested; pairs whose spans differ are
/// then listed in `skipped`.
inline PairwiseMatrix pairwise_analysis(const std::vector<Segment>& segments, const AnalysisOptions& options = {},
                                        std::string piece_id = {}) {
  PairwiseMatrix m;
  m.piece_id = std::move(piece_id);
  std::vector<const Segment*> used;
  for (const Segment& s : segments) {
    if (!s.partial || options.include_partial) used.push_back(&s);
  }
  if (used.size() < 2) {
    throw InfeasibleError("pairwise analysis needs at least 2 full segments, got " + std::to_string(used.size()));
  }
  m.segment_count = static_cast<int>(used.size());
  for (const Segment* s : used) {
    m.segments.push_back(s->index + 1);
    m.trees.push_back(build_sk_tree(*s));
  }

  // A trailing partial segment still starts at index * full width.
  const int bars = segments.front().bars();
  auto section = [&](const Segment* s) { return detail::section_of(s->index, bars, options.section_bars); };

  const int n = static_cast<int>(used.size());
  for (auto [i, j] : preset_pairs(options.pairs, n)) {
    const Segment* a = used[static_cast<std::size_t>(i - 1)];
    const Segment* b = used[static_cast<std::size_t>(j - 1)];
    const SegmentPair key{a->index + 1, b->index + 1};
    if (!options.section_bars.empty() && section(a) != section(b)) continue;
    if (a->span != b->span) {
      m.skipped.push_back(key);
      continue;
    }
    m.diffs.emplace(key, build_diff_tree(m.trees[static_cast<std::size_t>(i - 1)],
                                         m.trees[static_cast<std::size_t>(j - 1)]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Structure report

struct PairResult {
  SegmentPair pair;
  RelationLabel label;
};

struct SegmentGroup {
  std::vector<int> members;   // 1-based, ascending
  std::vector<int> variants;  // members joined only through a variation
  bool transposed = false;    // some member joined through a transposition
};

struct StructureReport {
  std::string piece_id;
  std::vector<int> segments;
  std::vector<PairResult> pairs;
  std::vector<SegmentGroup> groups;
  std::vector<int> phrase_boundaries;  // segments whose group differs from the previous segment's
  std::vector<FeatureTally> level_summaries;
  std::vector<std::string> warnings;
  std::map<RelationKind, int> kind_counts;
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace detail

inline StructureReport structure_report(const PairwiseMatrix& m, const ClassifyOptions& options = {}) {
  StructureReport r;
  r.piece_id = m.piece_id;
  r.segments = m.segments;
  for (RelationKind k : {RelationKind::exact_repetition, RelationKind::transposition, RelationKind::contour_match,
                         RelationKind::variation, RelationKind::unrelated}) {
    r.kind_counts[k] = 0;
  }

  const std::size_t n = m.segments.size();
  auto slot = [&](int number) {
    return static_cast<int>(std::find(m.segments.begin(), m.segments.end(), number) - m.segments.begin());
  };
  detail::UnionFind strong(n);
  detail::UnionFind loose(n);
  std::set<int> transposed_slots;

  for (const auto& [pair, diff] : m.diffs) {
    PairResult pr{pair, classify(diff, options)};
    ++r.kind_counts[pr.label.kind];
    const int a = slot(pair.first);
    const int b = slot(pair.second);
    switch (pr.label.kind) {
      case RelationKind::transposition:
        transposed_slots.insert(a);
        transposed_slots.insert(b);
        [[fallthrough]];
      case RelationKind::exact_repetition:
        strong.unite(a, b);
        loose.unite(a, b);
        break;
      case RelationKind::variation: loose.unite(a, b); break;
      default: break;
    }
    const auto levels = pr.label.per_level.size();
    if (r.level_summaries.size() < levels) r.level_summaries.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) r.level_summaries[l] += pr.label.per_level[l];
    r.pairs.push_back(std::move(pr));
  }

  std::map<int, SegmentGroup> by_root;
  for (std::size_t s = 0; s < n; ++s) {
    const int root = loose.find(static_cast<int>(s));
    SegmentGroup& g = by_root[root];
    g.members.push_back(m.segments[s]);
    if (strong.find(static_cast<int>(s)) != strong.find(root)) g.variants.push_back(m.segments[s]);
    if (transposed_slots.count(static_cast<int>(s))) g.transposed = true;
  }
  for (auto& [root, g] : by_root) r.groups.push_back(std::move(g));

  for (std::size_t s = 1; s < n; ++s) {
    if (loose.find(static_cast<int>(s)) != loose.find(static_cast<int>(s - 1))) r.phrase_boundaries.push_back(m.segments[s]);
  }

  // Exact repetition should be transitive on whatever pairs were compared.
  auto kind_of = [&](SegmentPair p) -> std::optional<RelationKind> {
    for (const PairResult& pr : r.pairs) {
      if (pr.pair == p) return pr.label.kind;
    }
    return std::nullopt;
  };
  for (const PairResult& ij : r.pairs) {
    if (ij.label.kind != RelationKind::exact_repetition) continue;
    for (const PairResult& jk : r.pairs) {
      if (jk.pair.first != ij.pair.second || jk.label.kind != RelationKind::exact_repetition) continue;
      const auto ik = kind_of({ij.pair.first, jk.pair.second});
      if (ik && *ik != RelationKind::exact_repetition) {
        r.warnings.push_back("exact repetition not transitive: (" + std::to_string(ij.pair.first) + "," +
                             std::to_string(ij.pair.second) + ") and (" + std::to_string(jk.pair.first) + "," +
                             std::to_string(jk.pair.second) + ") but (" + std::to_string(ij.pair.first) + "," +
                             std::to_string(jk.pair.second) + ") is " + std::string(to_string(*ik)));
      }
    }
  }
  return r;
}

}  // namespace skdiff
