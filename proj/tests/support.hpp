#pragma once

// Shared helpers for the test binaries: fixture access and random segments.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skdiff/skdiff.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(SKDIFF_FIXTURE_DIR) / name; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline skdiff::Melody fixture_melody(const std::string& name) {
  return skdiff::parse_leadsheet_text(read_text(fixture(name)));
}

inline std::vector<skdiff::Segment> fixture_segments(const std::string& name, int bars = 2) {
  return skdiff::segment_melody(fixture_melody(name), bars);
}

/// One segment covering a whole lead sheet given inline.
inline skdiff::Segment single_segment(const std::string& text) {
  const skdiff::Melody m = skdiff::parse_leadsheet_text(text);
  const int bars = static_cast<int>(m.length().count_of(m.meter().bar_length()));
  auto segs = skdiff::segment_melody(m, bars);
  return segs.front();
}

inline const std::vector<std::string>& lead_sheet_fixtures() {
  static const std::vector<std::string> kNames = {"ascending.lsht", "aba_c.lsht",     "a_aprime_b_a.lsht",
                                                  "triple.lsht",    "ties_rests.lsht", "leaf_vs_right.lsht",
                                                  "sixteen_bars.lsht"};
  return kNames;
}

/// Random grid-aligned segments of at most 16 slots in duple and triple meters,
/// with random key and chord context.
class SegmentGenerator {
 public:
  explicit SegmentGenerator(std::uint32_t seed) : rng_(seed) {}

  skdiff::Segment next() {
    static const std::vector<skdiff::Meter> kMeters = {{2, 4}, {3, 8}, {3, 4}, {6, 8}, {4, 4}};
    const skdiff::Meter meter = kMeters[pick(kMeters.size())];
    const int bars = 1 + static_cast<int>(pick(2));
    const skdiff::Duration span = meter.bar_length() * bars;

    // Finest hierarchy level with at most 16 slots, sometimes one level coarser.
    const auto sizes = skdiff::detail::full_hierarchy(meter, bars);
    std::size_t level = 0;
    while (level + 1 < sizes.size() && span.count_of(sizes[level + 1]) <= 16) ++level;
    if (level > 0 && pick(4) == 0) --level;
    const skdiff::Duration slot = sizes[level];
    const int slots = static_cast<int>(span.count_of(slot));

    const skdiff::KeySignature key{static_cast<int>(pick(12)), pick(2) ? skdiff::Mode::major : skdiff::Mode::minor};
    std::vector<skdiff::Note> notes;
    static const std::vector<int> kLengths = {1, 1, 1, 2, 2, 3, 4, 6};
    for (int at = 0; at < slots;) {
      const int len = std::min(kLengths[pick(kLengths.size())], slots - at);
      notes.push_back({skdiff::Pitch(55 + static_cast<int>(pick(25))), slot * at, slot * len, false});
      at += len;
    }

    std::vector<skdiff::HarmonySpan> harmony;
    const int cells = bars * (pick(2) ? 2 : 1);
    const skdiff::Duration cell = span / cells;
    for (int c = 0; c < cells; ++c) {
      // Mostly diatonic roots so chord tones and scale tones interact.
      static const std::vector<int> kDegrees = {0, 2, 4, 5, 7, 9, 11};
      const int root = pick(4) ? key.tonic + kDegrees[pick(kDegrees.size())] : static_cast<int>(pick(12));
      harmony.push_back({cell * c, cell, {root % 12, static_cast<skdiff::ChordQuality>(pick(7))}});
    }
    const skdiff::Melody m(std::move(notes), key, meter, std::move(harmony));
    return skdiff::segment_melody(m, bars).front();
  }

  std::mt19937& engine() { return rng_; }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937 rng_;
};

/// Same segment with notes, chords and key moved by `k` semitones.
inline skdiff::Segment transposed(const skdiff::Segment& s, int k) {
  skdiff::Segment out = s;
  for (auto& n : out.notes) n.pitch = n.pitch.transposed(k);
  for (auto& h : out.harmony) h.chord = h.chord.transposed(k);
  out.key = s.key.transposed(k);
  return out;
}

}  // namespace testing_support
