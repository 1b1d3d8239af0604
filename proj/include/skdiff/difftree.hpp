#pragma once

// Node-by-node comparison of two reduction trees.

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skdiff/error.hpp"
#include "skdiff/pitch_time.hpp"
#include "skdiff/skreduce.hpp"

namespace skdiff {

enum class SkFeature { same, diff };
enum class ChFeature { same, more, less };
enum class DirFeature { same, diff };
enum class IntFeature { same, narrow, wide };

inline std::string_view to_string(SkFeature f) { return f == SkFeature::same ? "same" : "diff"; }
inline std::string_view to_string(DirFeature f) { return f == DirFeature::same ? "same" : "diff"; }
inline std::string_view to_string(ChFeature f) {
  switch (f) {
    case ChFeature::same: return "same";
    case ChFeature::more: return "more";
    case ChFeature::less: return "less";
  }
  return "same";
}
inline std::string_view to_string(IntFeature f) {
  switch (f) {
    case IntFeature::same: return "same";
    case IntFeature::narrow: return "narrow";
    case IntFeature::wide: return "wide";
  }
  return "same";
}

/// Sk: survivor position agreement. Ch: child count of the right node relative
/// to the left. Dir and Int compare the first-to-last-child intervals and are
/// only present when both nodes are internal with equal child counts.
struct DiffFeatures {
  SkFeature sk = SkFeature::same;
  ChFeature ch = ChFeature::same;
  std::optional<DirFeature> dir;
  std::optional<IntFeature> int_width;

  bool all_same() const {
    return sk == SkFeature::same && ch == ChFeature::same && dir.value_or(DirFeature::same) == DirFeature::same &&
           int_width.value_or(IntFeature::same) == IntFeature::same;
  }

  friend bool operator==(const DiffFeatures&, const DiffFeatures&) = default;
};

/// Child indices from the root of a source tree.
using TreePath = std::vector<int>;

struct DiffNode {
  DiffFeatures features;
  std::vector<DiffNode> children;
  TreePath left_ref;
  TreePath right_ref;

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const DiffNode&, const DiffNode&) = default;
};

struct DiffTree {
  DiffNode root;
  int left_segment = 0;   // 0-based, left < right
  int right_segment = 1;
  int root_pitch_offset = 0;

  friend bool operator==(const DiffTree&, const DiffTree&) = default;
};

namespace detail {

enum class Side { first, middle, last };

// A leaf counts as expanded to the left.
inline Side survivor_side(const SkNode& n) {
  switch (n.expansion) {
    case Expansion::leaf:
    case Expansion::left: return Side::first;
    case Expansion::right: return Side::last;
    case Expansion::ternary:
      if (n.survivor == 0) return Side::first;
      if (n.survivor + 1 == static_cast<int>(n.children.size())) return Side::last;
      return Side::middle;
  }
  return Side::first;
}

inline int sign(int v) { return (v > 0) - (v < 0); }

inline int span_interval(const SkNode& n) { return pitch_interval(n.children.front().pitch, n.children.back().pitch); }

}  // namespace detail

inline DiffFeatures diff_features(const SkNode& a, const SkNode& b) {
  DiffFeatures f;
  const bool both_ternary = a.expansion == Expansion::ternary && b.expansion == Expansion::ternary;
  const bool same_side = both_ternary ? a.survivor == b.survivor
                                      : detail::survivor_side(a) == detail::survivor_side(b);
  f.sk = same_side ? SkFeature::same : SkFeature::diff;

  const std::size_t na = a.children.size();
  const std::size_t nb = b.children.size();
  f.ch = nb == na ? ChFeature::same : (nb > na ? ChFeature::more : ChFeature::less);

  if (f.ch == ChFeature::same && !a.is_leaf() && !b.is_leaf()) {
    const int ia = detail::span_interval(a);
    const int ib = detail::span_interval(b);
    f.dir = detail::sign(ia) == detail::sign(ib) ? DirFeature::same : DirFeature::diff;
    const int wa = std::abs(ia);
    const int wb = std::abs(ib);
    f.int_width = wb == wa ? IntFeature::same : (wb > wa ? IntFeature::wide : IntFeature::narrow);
  }
  return f;
}

namespace detail {

inline DiffNode diff_nodes(const SkNode& a, const SkNode& b, TreePath& left, TreePath& right) {
  DiffNode out{diff_features(a, b), {}, left, right};
  if (out.features.ch != ChFeature::same || a.is_leaf() || b.is_leaf()) return out;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    left.push_back(static_cast<int>(i));
    right.push_back(static_cast<int>(i));
    out.children.push_back(diff_nodes(a.children[i], b.children[i], left, right));
    left.pop_back();
    right.pop_back();
  }
  return out;
}

}  // namespace detail

/// Compares an earlier segment's tree against a later one. The comparison is
/// not commutative, so only forward pairs are accepted.
inline DiffTree build_diff_tree(const SkTree& earlier, const SkTree& later) {
  if (earlier.segment_index >= later.segment_index) {
    throw ComparisonError("segments must be compared forward: " + std::to_string(earlier.segment_index + 1) +
                          " is not before " + std::to_string(later.segment_index + 1));
  }
  if (earlier.root.duration != later.root.duration) {
    throw ComparisonError("cannot compare segments of unequal span (" + earlier.root.duration.to_string() +
                          " vs " + later.root.duration.to_string() + ")");
  }
  TreePath left;
  TreePath right;
  return {detail::diff_nodes(earlier.root, later.root, left, right), earlier.segment_index, later.segment_index,
          pitch_interval(earlier.root.pitch, later.root.pitch)};
}

// ---------------------------------------------------------------------------
// Tallies

struct FeatureTally {
  int nodes = 0;
  int leaves = 0;
  int sk_same = 0, sk_diff = 0;
  int ch_same = 0, ch_more = 0, ch_less = 0;
  int dir_same = 0, dir_diff = 0, dir_absent = 0;
  int int_same = 0, int_narrow = 0, int_wide = 0, int_absent = 0;

  /// Nodes with at least one feature other than "same".
  int differing = 0;

  void add(const DiffNode& n) {
    const DiffFeatures& f = n.features;
    ++nodes;
    if (n.is_leaf()) ++leaves;
    (f.sk == SkFeature::same ? sk_same : sk_diff)++;
    switch (f.ch) {
      case ChFeature::same: ++ch_same; break;
      case ChFeature::more: ++ch_more; break;
      case ChFeature::less: ++ch_less; break;
    }
    if (!f.dir) ++dir_absent;
    else (*f.dir == DirFeature::same ? dir_same : dir_diff)++;
    if (!f.int_width) ++int_absent;
    else switch (*f.int_width) {
      case IntFeature::same: ++int_same; break;
      case IntFeature::narrow: ++int_narrow; break;
      case IntFeature::wide: ++int_wide; break;
    }
    if (!f.all_same()) ++differing;
  }

  FeatureTally& operator+=(const FeatureTally& o) {
    nodes += o.nodes; leaves += o.leaves;
    sk_same += o.sk_same; sk_diff += o.sk_diff;
    ch_same += o.ch_same; ch_more += o.ch_more; ch_less += o.ch_less;
    dir_same += o.dir_same; dir_diff += o.dir_diff; dir_absent += o.dir_absent;
    int_same += o.int_same; int_narrow += o.int_narrow; int_wide += o.int_wide; int_absent += o.int_absent;
    differing += o.differing;
    return *this;
  }

  friend bool operator==(const FeatureTally&, const FeatureTally&) = default;
};

struct DiffSummary {
  int node_count = 0;
  int leaf_count = 0;
  int depth = 0;
  std::vector<FeatureTally> per_level;  // index 0 = root level
  FeatureTally total;
};

inline DiffSummary diff_depth_and_counts(const DiffTree& d) {
  DiffSummary s;
  std::vector<const DiffNode*> level{&d.root};
  while (!level.empty()) {
    FeatureTally t;
    std::vector<const DiffNode*> next;
    for (const DiffNode* n : level) {
      t.add(*n);
      for (const DiffNode& c : n->children) next.push_back(&c);
    }
    s.total += t;
    s.per_level.push_back(t);
    level = std::move(next);
  }
  s.node_count = s.total.nodes;
  s.leaf_count = s.total.leaves;
  s.depth = static_cast<int>(s.per_level.size());
  return s;
}

}  // namespace skdiff
