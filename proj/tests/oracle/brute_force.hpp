#pragma once

// Reference reducer for the tests. It rewrites a flat note list level by level
// with its own scoring and window rule and keeps no tree, so agreement with
// the library's trees is meaningful. Only the input value types are shared.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "skdiff/segmenter.hpp"

namespace oracle {

struct Event {
  int midi = 60;
  skdiff::Duration onset;
  skdiff::Duration length;
  bool tied = false;

  friend bool operator==(const Event&, const Event&) = default;
};

using Level = std::vector<Event>;

inline int pc(int midi) { return ((midi % 12) + 12) % 12; }

// Chord members as semitones above the root, in root, third, fifth, seventh order.
inline std::vector<int> members(skdiff::ChordQuality q) {
  using Q = skdiff::ChordQuality;
  switch (q) {
    case Q::major: return {0, 4, 7};
    case Q::minor: return {0, 3, 7};
    case Q::dominant7: return {0, 4, 7, 10};
    case Q::major7: return {0, 4, 7, 11};
    case Q::minor7: return {0, 3, 7, 10};
    case Q::diminished: return {0, 3, 6};
    case Q::augmented: return {0, 4, 8};
  }
  return {};
}

// Root 4, fifth 3, third 2, seventh 1, anything else 0.
inline int member_weight(const skdiff::ChordSymbol& chord, int midi) {
  const std::vector<int> m = members(chord.quality);
  static constexpr std::array<int, 4> kWeight = {4, 2, 3, 1};
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (pc(chord.root + m[i]) == pc(midi)) return kWeight[i];
  }
  return 0;
}

inline bool in_scale(const skdiff::KeySignature& key, int midi) {
  static constexpr std::array<int, 7> kMajor = {0, 2, 4, 5, 7, 9, 11};
  static constexpr std::array<int, 7> kMinor = {0, 2, 3, 5, 7, 8, 10};
  const auto& steps = key.mode == skdiff::Mode::major ? kMajor : kMinor;
  for (int s : steps) {
    if (pc(key.tonic + s) == pc(midi)) return true;
  }
  return false;
}

inline bool divides(skdiff::Duration unit, skdiff::Duration t) {
  const auto q = t.value() / unit.value();
  return q.denominator() == 1;
}

inline int accents(const skdiff::Meter& meter, skdiff::Duration t) {
  const skdiff::Duration beat(1, meter.beat_unit);
  return divides(meter.bar_length(), t) + divides(beat, t) + divides(beat / 2, t);
}

/// Single integer score; larger is more important. Held-over notes never win.
inline int score(const Event& e, const skdiff::ChordSymbol& chord, const skdiff::KeySignature& key,
                 const skdiff::Meter& meter) {
  if (e.tied) return -1;
  const int weight = member_weight(chord, e.midi);
  return (weight > 0 ? 1000 : 0) + weight * 100 + (in_scale(key, e.midi) ? 10 : 0) + accents(meter, e.onset);
}

inline skdiff::ChordSymbol chord_sounding(const std::vector<skdiff::HarmonySpan>& harmony, skdiff::Duration t) {
  skdiff::ChordSymbol found = harmony.front().chord;
  for (const auto& h : harmony) {
    if (h.onset <= t) found = h.chord;
  }
  return found;
}

/// Triple meters group three beats at the beat level; everything else pairs.
inline int grouping(const skdiff::Meter& meter, skdiff::Duration shortest) {
  return shortest == skdiff::Duration(1, meter.beat_unit) && meter.beats % 3 == 0 ? 3 : 2;
}

/// All levels of a quantized segment, surface first, until one event remains.
inline std::vector<Level> reduce_all(const skdiff::Segment& seg) {
  Level current;
  for (const auto& n : seg.notes) current.push_back({n.pitch.midi(), n.onset, n.duration, n.tie_continuation});
  std::vector<Level> levels{current};
  while (current.size() > 1) {
    skdiff::Duration shortest = current.front().length;
    for (const Event& e : current) {
      if (e.length < shortest) shortest = e.length;
    }
    const skdiff::Duration window = shortest * grouping(seg.meter, shortest);
    Level next;
    for (skdiff::Duration start; start < seg.span; start += window) {
      std::vector<Event> inside;
      for (const Event& e : current) {
        if (e.onset >= start && e.onset < start + window) inside.push_back(e);
      }
      if (inside.empty()) continue;
      if (inside.size() == 1) {
        next.push_back(inside.front());
        continue;
      }
      const skdiff::ChordSymbol chord = chord_sounding(seg.harmony, start);
      std::size_t best = 0;
      for (std::size_t i = 1; i < inside.size(); ++i) {
        if (score(inside[i], chord, seg.key, seg.meter) > score(inside[best], chord, seg.key, seg.meter)) best = i;
      }
      next.push_back({inside[best].midi, start, window, best == 0 && inside[best].tied});
    }
    if (next.size() == current.size()) break;  // nothing merged; the window rule is stuck
    current = next;
    levels.push_back(current);
  }
  return levels;
}

}  // namespace oracle
