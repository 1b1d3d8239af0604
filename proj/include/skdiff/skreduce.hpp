#pragma once

// Iterated window reduction of a segment into a hierarchical reduction tree.
//
// Each pass partitions the segment into windows twice (or, at the single
// ternary level of a triple meter, three times) as long as the shortest
// note of the current level. In every window holding more than one note the
// most important note survives and is stretched over the window; a lone note
// that already fills its window passes through unchanged. Passes repeat until
// one note spans the segment. The surviving notes of all passes form the tree.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skdiff/error.hpp"
#include "skdiff/pitch_time.hpp"
#include "skdiff/segmenter.hpp"

namespace skdiff {

/// Which child of a window survived into its parent.
enum class Expansion { leaf, left, right, ternary };

struct SkNode {
  Pitch pitch{60};
  Duration onset;
  Duration duration;
  std::vector<SkNode> children;
  Expansion expansion = Expansion::leaf;
  int survivor = 0;  // index of the surviving child; 0 for leaves
  int level = 0;     // pass that formed the node; surface notes are level 0

  bool is_leaf() const { return children.empty(); }

  /// "LEAF", "L", "R", or "T<i>" for ternary windows.
  std::string expansion_label() const {
    switch (expansion) {
      case Expansion::leaf: return "LEAF";
      case Expansion::left: return "L";
      case Expansion::right: return "R";
      case Expansion::ternary: return "T" + std::to_string(survivor);
    }
    return "LEAF";
  }

  friend bool operator==(const SkNode&, const SkNode&) = default;
};

struct SkTree {
  SkNode root;
  int segment_index = 0;
  int levels = 1;  // number of reduction levels including the surface
  Duration grid_unit;

  friend bool operator==(const SkTree&, const SkTree&) = default;
};

// ---------------------------------------------------------------------------
// Importance

/// Lexicographic importance: chord membership, chord-member rank, scale
/// membership, metric strength, then the leftmost note.
struct ImportanceKey {
  bool is_chord_tone = false;
  int chord_member_rank = -1;
  bool is_scale_tone = false;
  int metric_strength = 0;
  int position = 0;  // ordinal within the window; lower wins ties

  friend bool operator==(const ImportanceKey&, const ImportanceKey&) = default;
  friend std::strong_ordering operator<=>(const ImportanceKey& a, const ImportanceKey& b) {
    if (auto c = a.is_chord_tone <=> b.is_chord_tone; c != 0) return c;
    if (auto c = a.chord_member_rank <=> b.chord_member_rank; c != 0) return c;
    if (auto c = a.is_scale_tone <=> b.is_scale_tone; c != 0) return c;
    if (auto c = a.metric_strength <=> b.metric_strength; c != 0) return c;
    return b.position <=> a.position;
  }
};

/// A tie continuation ranks below every attacked note: no chord or scale
/// membership and a metric strength of -1.
inline ImportanceKey importance(const Note& note, const ChordSymbol& chord, const KeySignature& key,
                                const Meter& meter, int position = 0) {
  ImportanceKey k;
  k.position = position;
  if (note.tie_continuation) {
    k.metric_strength = -1;
    return k;
  }
  const int pc = note.pitch.pitch_class();
  k.chord_member_rank = chord_member_rank(chord, pc);
  k.is_chord_tone = k.chord_member_rank >= 0;
  k.is_scale_tone = key.scale_tones().contains(pc);
  k.metric_strength = metric_strength(note.onset, meter);
  return k;
}

// ---------------------------------------------------------------------------
// One reduction pass

struct ReductionContext {
  KeySignature key;
  Meter meter;
  std::vector<HarmonySpan> harmony;

  static ReductionContext of(const Segment& s) { return {s.key, s.meter, s.harmony}; }
};

struct SelectionRecord {
  Duration window_onset;
  Duration window;
  std::vector<std::size_t> inputs;  // indices into the pass input
  int survivor = 0;                 // index into `inputs`

  friend bool operator==(const SelectionRecord&, const SelectionRecord&) = default;
};

struct ReductionPass {
  std::vector<Note> notes;
  std::vector<SelectionRecord> selections;
};

/// Reduces one level. Windows partition [0, span) from onset 0; the chord
/// governing a window's start supplies the harmonic context for all its notes.
inline ReductionPass reduce_once(std::span<const Note> notes, Duration window, const ReductionContext& ctx,
                                 Duration span) {
  if (!window.is_positive() || !span.is_multiple_of(window)) {
    throw InfeasibleError("window " + window.to_string() + " does not evenly divide span " + span.to_string());
  }
  ReductionPass out;
  std::size_t next = 0;
  for (Duration start; start < span; start += window) {
    const Duration stop = start + window;
    SelectionRecord rec{start, window, {}, 0};
    while (next < notes.size() && notes[next].onset < stop) rec.inputs.push_back(next++);
    if (rec.inputs.empty()) continue;  // still inside a longer note

    if (rec.inputs.size() == 1) {
      const Note& n = notes[rec.inputs.front()];
      if (n.onset != start || n.end() < stop || !(n.end() - start).is_multiple_of(window)) {
        throw InfeasibleError("note " + n.pitch.name() + " at " + n.onset.to_string() +
                              " is not aligned to window " + window.to_string());
      }
      out.notes.push_back(n);
      out.selections.push_back(std::move(rec));
      continue;
    }

    const ChordSymbol& chord = chord_at(ctx.harmony, start);
    ImportanceKey best;
    for (std::size_t i = 0; i < rec.inputs.size(); ++i) {
      const Note& n = notes[rec.inputs[i]];
      if (n.end() > stop) {
        throw InfeasibleError("note " + n.pitch.name() + " at " + n.onset.to_string() +
                              " straddles the window boundary at " + stop.to_string());
      }
      const ImportanceKey key = importance(n, chord, ctx.key, ctx.meter, static_cast<int>(i));
      if (i == 0 || key > best) {
        best = key;
        rec.survivor = static_cast<int>(i);
      }
    }
    const Note& winner = notes[rec.inputs[static_cast<std::size_t>(rec.survivor)]];
    out.notes.push_back({winner.pitch, start, window, rec.survivor == 0 && winner.tie_continuation});
    out.selections.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree construction

/// Builds the reduction tree of a segment (quantizing it first).
inline SkTree build_sk_tree(const Segment& segment) {
  const Segment q = quantize_to_grid(segment);
  const std::vector<GridWindow> schedule = window_schedule(q);
  const ReductionContext ctx = ReductionContext::of(q);

  std::vector<SkNode> frontier;
  frontier.reserve(q.notes.size());
  for (const Note& n : q.notes) frontier.push_back({n.pitch, n.onset, n.duration, {}, Expansion::leaf, 0, 0});

  std::vector<Note> level_notes = q.notes;
  int level = 0;
  for (const GridWindow& w : schedule) {
    ++level;
    ReductionPass pass = reduce_once(level_notes, w.size, ctx, q.span);
    std::vector<SkNode> next;
    next.reserve(pass.selections.size());
    for (std::size_t i = 0; i < pass.selections.size(); ++i) {
      const SelectionRecord& sel = pass.selections[i];
      if (sel.inputs.size() == 1) {
        next.push_back(std::move(frontier[sel.inputs.front()]));
        continue;
      }
      SkNode node;
      node.pitch = pass.notes[i].pitch;
      node.onset = sel.window_onset;
      node.duration = sel.window;
      node.survivor = sel.survivor;
      node.level = level;
      if (w.factor == 3) node.expansion = Expansion::ternary;
      else node.expansion = sel.survivor == 0 ? Expansion::left : Expansion::right;
      for (std::size_t idx : sel.inputs) node.children.push_back(std::move(frontier[idx]));
      next.push_back(std::move(node));
    }
    frontier = std::move(next);
    level_notes = std::move(pass.notes);
  }
  if (frontier.size() != 1) {
    throw InfeasibleError("reduction of segment " + std::to_string(segment.index + 1) +
                          " did not converge to a single note");
  }
  return {std::move(frontier.front()), segment.index, level + 1, q.grid_unit};
}

namespace detail {

inline void collect_leaves(const SkNode& n, std::vector<Note>& out) {
  if (n.is_leaf()) {
    out.push_back({n.pitch, n.onset, n.duration, false});
    return;
  }
  for (const SkNode& c : n.children) collect_leaves(c, out);
}

inline void collect_level(const SkNode& n, int level, std::vector<Note>& out) {
  if (n.level <= level) {
    out.push_back({n.pitch, n.onset, n.duration, false});
    return;
  }
  for (const SkNode& c : n.children) collect_level(c, level, out);
}

}  // namespace detail

/// Surface notes in temporal order (tie flags are not kept in the tree).
inline std::vector<Note> tree_leaves(const SkTree& t) {
  std::vector<Note> out;
  detail::collect_leaves(t.root, out);
  return out;
}

/// The melody at reduction level `level` (0 = surface, levels-1 = the root alone).
inline std::vector<Note> level_sequence(const SkTree& t, int level) {
  std::vector<Note> out;
  detail::collect_level(t.root, level, out);
  return out;
}

/// Maximum root-to-leaf path length counted in nodes.
inline int node_depth(const SkNode& n) {
  int deepest = 0;
  for (const SkNode& c : n.children) deepest = std::max(deepest, node_depth(c));
  return deepest + 1;
}

inline std::size_t node_count(const SkNode& n) {
  std::size_t total = 1;
  for (const SkNode& c : n.children) total += node_count(c);
  return total;
}

}  // namespace skdiff
