#pragma once

// Equal-width segmentation of a melody and quantization of each segment onto
// the metrical grid used by the reducer.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skdiff/error.hpp"
#include "skdiff/pitch_time.hpp"

namespace skdiff {

struct Segment {
  int index = 0;                      // 0-based; user-facing output adds one
  std::vector<Note> notes;            // onsets relative to the segment start
  Duration span;
  KeySignature key;
  Meter meter;
  std::vector<HarmonySpan> harmony;   // clipped to [0, span)
  Duration grid_unit;
  bool partial = false;

  int bars() const { return static_cast<int>(span.count_of(meter.bar_length())); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// One reduction level: windows of `size`, each grouping `factor` windows of the level below.
struct GridWindow {
  Duration size;
  int factor = 2;

  friend bool operator==(const GridWindow&, const GridWindow&) = default;
};

namespace detail {

inline constexpr int kMaxSubdivisionDepth = 16;

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

/// Metrical hierarchy of a segment from its span down to the beat, coarsest first.
/// Duple meters split binary throughout; a beat count of 3 (or 3 * 2^k for
/// compound meters) contributes exactly one ternary split just above the beat.
inline std::vector<Duration> upper_hierarchy(const Meter& meter, int bars) {
  const Duration bar = meter.bar_length();
  std::vector<Duration> sizes{bar * bars};
  if (bars == 2) sizes.push_back(bar);
  else if (bars != 1) throw InfeasibleError("segments must span one or two bars");

  const bool ternary = meter.beats % 3 == 0;
  int groups = ternary ? meter.beats / 3 : meter.beats;
  if (!is_power_of_two(groups)) {
    throw InfeasibleError("meter " + meter.to_string() + " has no supported metrical hierarchy");
  }
  Duration current = bar;
  for (; groups > 1; groups /= 2) {
    current = current / 2;
    sizes.push_back(current);
  }
  if (ternary) sizes.push_back(current / 3);
  return sizes;
}

/// Full hierarchy: upper levels followed by binary subdivisions of the beat.
inline std::vector<Duration> full_hierarchy(const Meter& meter, int bars) {
  std::vector<Duration> sizes = upper_hierarchy(meter, bars);
  Duration d = sizes.back();
  for (int k = 0; k < kMaxSubdivisionDepth; ++k) {
    d = d / 2;
    sizes.push_back(d);
  }
  return sizes;
}

inline Duration gcd_of(const std::vector<Note>& notes, Duration span) {
  Duration g = span;
  for (const Note& n : notes) g = gcd(gcd(g, n.onset), n.duration);
  return g;
}

/// Splits [onset, end) so that at every window size each piece either lies inside
/// one window or covers whole aligned windows. `windows` is ordered coarsest first.
inline void split_to_windows(Duration onset, Duration end, std::span<const Duration> windows,
                             std::vector<std::pair<Duration, Duration>>& out) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Duration w = windows[i];
    const Duration start = onset.floor_to(w);
    if (start + w >= end) continue;  // inside one window
    if (onset.is_multiple_of(w) && end.is_multiple_of(w)) break;
    Duration cut = start + w;
    Duration from = onset;
    while (cut < end) {
      split_to_windows(from, cut, windows.subspan(i + 1), out);
      from = cut;
      cut = cut + w;
    }
    split_to_windows(from, end, windows.subspan(i + 1), out);
    return;
  }
  out.emplace_back(onset, end);
}

}  // namespace detail

/// Reduction windows for a quantized segment, finest first, ending at the span.
inline std::vector<GridWindow> window_schedule(const Meter& meter, int bars, Duration grid_unit) {
  const std::vector<Duration> sizes = detail::full_hierarchy(meter, bars);
  auto it = std::find(sizes.begin(), sizes.end(), grid_unit);
  if (it == sizes.end()) {
    throw InfeasibleError("grid unit " + grid_unit.to_string() + " is not a level of the " +
                          meter.to_string() + " hierarchy");
  }
  std::vector<GridWindow> out;
  for (auto lvl = it; lvl != sizes.begin(); --lvl) {
    const Duration coarser = *std::prev(lvl);
    out.push_back({coarser, static_cast<int>(coarser.count_of(*lvl))});
  }
  return out;
}

inline std::vector<GridWindow> window_schedule(const Segment& s) {
  return window_schedule(s.meter, s.bars(), s.grid_unit);
}

/// Splits a melody into contiguous segments of `bars_per_segment` bars (1 or 2).
/// Notes crossing a boundary are split, the right part flagged as a tie
/// continuation. A shorter trailing segment is flagged partial.
inline std::vector<Segment> segment_melody(const Melody& m, int bars_per_segment) {
  if (bars_per_segment != 1 && bars_per_segment != 2) {
    throw InfeasibleError("bars per segment must be 1 or 2, got " + std::to_string(bars_per_segment));
  }
  const Duration bar = m.meter().bar_length();
  const Duration length = m.length();
  if (!length.is_multiple_of(bar)) {
    throw InfeasibleError("melody length " + length.to_string() + " is not a whole number of " +
                          m.meter().to_string() + " bars");
  }
  Duration expected;
  for (const Note& n : m.notes()) {
    if (n.onset != expected) {
      throw MelodyError("melody has a gap at " + expected.to_string() + "; rests must be absorbed first");
    }
    expected = n.end();
  }

  const Duration width = bar * bars_per_segment;
  std::vector<Segment> out;
  for (Duration start; start < length; start += width) {
    const Duration stop = std::min(start + width, length);
    Segment seg;
    seg.index = static_cast<int>(out.size());
    seg.span = stop - start;
    seg.partial = seg.span != width;
    seg.key = m.key();
    seg.meter = m.meter();
    for (const Note& n : m.notes()) {
      if (n.end() <= start || n.onset >= stop) continue;
      Note part = n;
      part.onset = std::max(n.onset, start) - start;
      part.duration = std::min(n.end(), stop) - start - part.onset;
      part.tie_continuation = n.onset < start || n.tie_continuation;
      seg.notes.push_back(part);
    }
    std::vector<HarmonySpan> harmony;
    for (const HarmonySpan& h : m.harmony()) {
      if (h.end() <= start || h.onset >= stop) continue;
      const Duration on = std::max(h.onset, start);
      harmony.push_back({on - start, std::min(h.end(), stop) - on, h.chord});
    }
    seg.harmony = std::move(harmony);
    seg.grid_unit = detail::gcd_of(seg.notes, seg.span);
    out.push_back(std::move(seg));
  }
  return out;
}

/// Places a segment on the finest metrical level that holds all of its onsets and
/// durations, splitting notes that straddle a reduction window into tied parts.
inline Segment quantize_to_grid(const Segment& s) {
  if (s.notes.empty()) throw InfeasibleError("cannot quantize an empty segment");
  const std::vector<Duration> sizes = detail::full_hierarchy(s.meter, s.bars());

  auto fits = [&](Duration v) {
    return std::find_if(sizes.begin(), sizes.end(), [&](Duration h) { return v.is_multiple_of(h); });
  };
  for (std::size_t i = 0; i < s.notes.size(); ++i) {
    const Note& n = s.notes[i];
    if (fits(gcd(n.onset, n.duration)) == sizes.end()) {
      throw InfeasibleError("note " + std::to_string(i + 1) + " (" + n.pitch.name() + " at " +
                            n.onset.to_string() + ", duration " + n.duration.to_string() +
                            ") does not fit the " + s.meter.to_string() + " metrical grid");
    }
  }

  Segment out = s;
  Duration grid = *fits(detail::gcd_of(out.notes, out.span));
  for (int round = 0; round < detail::kMaxSubdivisionDepth; ++round) {
    std::vector<Duration> windows;
    for (const Duration& h : sizes) {
      if (h > grid) windows.push_back(h);
    }
    std::vector<Note> notes;
    for (const Note& n : out.notes) {
      std::vector<std::pair<Duration, Duration>> pieces;
      detail::split_to_windows(n.onset, n.end(), windows, pieces);
      for (std::size_t p = 0; p < pieces.size(); ++p) {
        notes.push_back({n.pitch, pieces[p].first, pieces[p].second - pieces[p].first,
                         p == 0 ? n.tie_continuation : true});
      }
    }
    out.notes = std::move(notes);
    const Duration next = *fits(detail::gcd_of(out.notes, out.span));
    if (next == grid) break;
    grid = next;
  }
  out.grid_unit = grid;
  return out;
}

}  // namespace skdiff
