#pragma once

// Immutable vocabulary for pitch, rhythm, harmony and meter.
//
// All time values are exact rationals measured in whole notes, so a quarter
// note lasts 1/4 and a dotted eighth 3/16.

#include <algorithm>
#include <array>
#include <bitset>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "skdiff/error.hpp"

namespace skdiff {

// ---------------------------------------------------------------------------
// Duration

class Duration {
 public:
  using rep = boost::rational<std::int64_t>;

  Duration() = default;
  Duration(std::int64_t num, std::int64_t den) : value_(num, den) {}
  explicit Duration(rep value) : value_(value) {}

  static Duration whole_notes(std::int64_t n) { return Duration(n, 1); }

  std::int64_t num() const { return value_.numerator(); }
  std::int64_t den() const { return value_.denominator(); }
  rep value() const { return value_; }

  bool is_zero() const { return value_.numerator() == 0; }
  bool is_positive() const { return value_.numerator() > 0; }

  /// True when this duration is an integer multiple of `unit` (unit > 0).
  bool is_multiple_of(Duration unit) const { return (value_ / unit.value_).denominator() == 1; }

  /// Number of `unit`s in this duration; throws if not integral.
  std::int64_t count_of(Duration unit) const {
    const rep q = value_ / unit.value_;
    if (q.denominator() != 1) {
      throw InfeasibleError(to_string() + " is not a multiple of " + unit.to_string());
    }
    return q.numerator();
  }

  /// Largest multiple of `unit` not exceeding this value.
  Duration floor_to(Duration unit) const {
    const rep q = value_ / unit.value_;
    std::int64_t n = q.numerator() / q.denominator();
    if (q.numerator() < 0 && q.numerator() % q.denominator() != 0) --n;
    return unit * n;
  }

  /// Exact "num/den" form, never a decimal. Integers still carry "/1".
  std::string to_string() const { return std::to_string(num()) + "/" + std::to_string(den()); }

  static Duration parse(std::string_view text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string_view::npos) return Duration(std::stoll(std::string(text)), 1);
      return Duration(std::stoll(std::string(text.substr(0, slash))),
                      std::stoll(std::string(text.substr(slash + 1))));
    } catch (const std::exception&) {
      throw ParseError("invalid rational '" + std::string(text) + "'");
    }
  }

  Duration& operator+=(Duration o) { value_ += o.value_; return *this; }
  Duration& operator-=(Duration o) { value_ -= o.value_; return *this; }

  friend Duration operator+(Duration a, Duration b) { return Duration(a.value_ + b.value_); }
  friend Duration operator-(Duration a, Duration b) { return Duration(a.value_ - b.value_); }
  friend Duration operator*(Duration a, std::int64_t k) { return Duration(a.value_ * k); }
  friend Duration operator*(std::int64_t k, Duration a) { return Duration(a.value_ * k); }
  friend Duration operator/(Duration a, std::int64_t k) { return Duration(a.value_ / k); }
  friend rep operator/(Duration a, Duration b) { return a.value_ / b.value_; }

  friend bool operator==(Duration a, Duration b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(Duration a, Duration b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ == b.value_) return std::strong_ordering::equal;
    return std::strong_ordering::greater;
  }

 private:
  rep value_{0};
};

/// Greatest common divisor on the rational line: the largest d with a/d and b/d integral.
inline Duration gcd(Duration a, Duration b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::int64_t n = std::gcd(a.num(), b.num());
  const std::int64_t d = std::lcm(a.den(), b.den());
  return Duration(n, d);
}

// ---------------------------------------------------------------------------
// Pitch

namespace detail {

inline constexpr std::array<std::string_view, 12> kSharpNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
inline constexpr std::array<std::string_view, 12> kFlatNames = {
    "C", "Db", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B"};

inline int step_pitch_class(char step) {
  switch (step) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: throw ParseError(std::string("invalid pitch step '") + step + "'");
  }
}

inline int mod12(int x) { return ((x % 12) + 12) % 12; }

/// Reads a step letter plus accidentals ('#' / 'b') from the front of `text`.
/// Returns (step, alter, characters consumed).
inline std::tuple<char, int, std::size_t> read_step_alter(std::string_view text) {
  if (text.empty()) throw ParseError("expected pitch name");
  const char step = text[0];
  step_pitch_class(step);
  int alter = 0;
  std::size_t i = 1;
  for (; i < text.size(); ++i) {
    if (text[i] == '#') ++alter;
    else if (text[i] == 'b') --alter;
    else break;
  }
  return {step, alter, i};
}

}  // namespace detail

/// Parses a pitch-class name such as "C", "F#", "Bb".
inline int parse_pitch_class(std::string_view name) {
  const auto [step, alter, used] = detail::read_step_alter(name);
  if (used != name.size()) throw ParseError("invalid pitch class '" + std::string(name) + "'");
  return detail::mod12(detail::step_pitch_class(step) + alter);
}

inline std::string pitch_class_name(int pc, bool prefer_flats = true) {
  const auto& names = prefer_flats ? detail::kFlatNames : detail::kSharpNames;
  return std::string(names[static_cast<std::size_t>(detail::mod12(pc))]);
}

struct SpelledPitch {
  char step = 'C';
  int alter = 0;
  int octave = 4;

  int midi() const { return (octave + 1) * 12 + detail::step_pitch_class(step) + alter; }

  std::string to_string() const {
    std::string out(1, step);
    out += alter >= 0 ? std::string(static_cast<std::size_t>(alter), '#')
                      : std::string(static_cast<std::size_t>(-alter), 'b');
    return out + std::to_string(octave);
  }

  friend bool operator==(const SpelledPitch&, const SpelledPitch&) = default;
};

/// A semitone pitch (MIDI numbering, C4 = 60). Equality ignores spelling.
class Pitch {
 public:
  explicit Pitch(int midi) : midi_(checked(midi)) {}
  explicit Pitch(SpelledPitch spelled) : midi_(checked(spelled.midi())), spelling_(spelled) {}

  /// "C4", "F#5", "Bb3".
  static Pitch parse(std::string_view text) {
    const auto [step, alter, used] = detail::read_step_alter(text);
    const std::string_view rest = text.substr(used);
    if (rest.empty()) throw ParseError("pitch '" + std::string(text) + "' lacks an octave");
    int octave = 0;
    try {
      std::size_t pos = 0;
      octave = std::stoi(std::string(rest), &pos);
      if (pos != rest.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("invalid octave in pitch '" + std::string(text) + "'");
    }
    return Pitch(SpelledPitch{step, alter, octave});
  }

  int midi() const { return midi_; }
  int pitch_class() const { return midi_ % 12; }
  const std::optional<SpelledPitch>& spelling() const { return spelling_; }

  /// Spelled form when present, otherwise a sharp spelling.
  std::string name() const {
    if (spelling_) return spelling_->to_string();
    return pitch_class_name(pitch_class(), false) + std::to_string(midi_ / 12 - 1);
  }

  /// Transposed pitch; the spelling is dropped.
  Pitch transposed(int semitones) const { return Pitch(midi_ + semitones); }

  friend bool operator==(const Pitch& a, const Pitch& b) { return a.midi_ == b.midi_; }

 private:
  static int checked(int midi) {
    if (midi < 0 || midi > 127) {
      throw MelodyError("pitch " + std::to_string(midi) + " outside MIDI range [0, 127]");
    }
    return midi;
  }

  int midi_;
  std::optional<SpelledPitch> spelling_;
};

/// Signed semitone distance from a to b.
inline int pitch_interval(const Pitch& a, const Pitch& b) { return b.midi() - a.midi(); }

// ---------------------------------------------------------------------------
// Pitch-class sets, chords, keys

class PitchClassSet {
 public:
  PitchClassSet() = default;
  PitchClassSet(std::initializer_list<int> pcs) {
    for (int pc : pcs) insert(pc);
  }

  void insert(int pc) { bits_.set(static_cast<std::size_t>(detail::mod12(pc))); }
  bool contains(int pc) const { return bits_.test(static_cast<std::size_t>(detail::mod12(pc))); }
  std::size_t size() const { return bits_.count(); }

  friend bool operator==(const PitchClassSet&, const PitchClassSet&) = default;

 private:
  std::bitset<12> bits_;
};

enum class ChordQuality { major, minor, dominant7, major7, minor7, diminished, augmented };

namespace detail {

struct QualityInfo {
  ChordQuality quality;
  std::string_view suffix;
  std::string_view name;
  std::array<int, 4> intervals;  // root, third, fifth, seventh (-1 = absent)
};

inline constexpr std::array<QualityInfo, 7> kQualities = {{
    {ChordQuality::major, "", "major", {0, 4, 7, -1}},
    {ChordQuality::minor, "m", "minor", {0, 3, 7, -1}},
    {ChordQuality::dominant7, "7", "dominant7", {0, 4, 7, 10}},
    {ChordQuality::major7, "maj7", "major7", {0, 4, 7, 11}},
    {ChordQuality::minor7, "m7", "minor7", {0, 3, 7, 10}},
    {ChordQuality::diminished, "dim", "diminished", {0, 3, 6, -1}},
    {ChordQuality::augmented, "aug", "augmented", {0, 4, 8, -1}},
}};

inline const QualityInfo& quality_info(ChordQuality q) {
  return kQualities[static_cast<std::size_t>(q)];
}

}  // namespace detail

inline std::string_view to_string(ChordQuality q) { return detail::quality_info(q).name; }

struct ChordSymbol {
  int root = 0;
  ChordQuality quality = ChordQuality::major;

  /// Lead-sheet spelling: "C", "F#m", "Bb7", "Dmaj7", "Em7", "Bdim", "Caug".
  static ChordSymbol parse(std::string_view text) {
    const auto [step, alter, used] = detail::read_step_alter(text);
    const std::string_view suffix = text.substr(used);
    for (const auto& info : detail::kQualities) {
      if (info.suffix == suffix) {
        return {detail::mod12(detail::step_pitch_class(step) + alter), info.quality};
      }
    }
    throw ParseError("unsupported chord quality '" + std::string(suffix) + "' in '" +
                     std::string(text) + "'");
  }

  std::string name() const {
    return pitch_class_name(root) + std::string(detail::quality_info(quality).suffix);
  }

  ChordSymbol transposed(int semitones) const { return {detail::mod12(root + semitones), quality}; }

  friend bool operator==(const ChordSymbol&, const ChordSymbol&) = default;
};

inline PitchClassSet chord_tones(const ChordSymbol& chord) {
  PitchClassSet out;
  for (int iv : detail::quality_info(chord.quality).intervals) {
    if (iv >= 0) out.insert(chord.root + iv);
  }
  return out;
}

/// Stability rank of a pitch class within a chord: root 3, fifth 2, third 1,
/// seventh 0, non-chord tone -1.
inline int chord_member_rank(const ChordSymbol& chord, int pc) {
  static constexpr std::array<int, 4> kRankBySlot = {3, 1, 2, 0};
  const auto& iv = detail::quality_info(chord.quality).intervals;
  for (std::size_t slot = 0; slot < iv.size(); ++slot) {
    if (iv[slot] >= 0 && detail::mod12(chord.root + iv[slot]) == detail::mod12(pc)) {
      return kRankBySlot[slot];
    }
  }
  return -1;
}

enum class Mode { major, minor };

inline std::string_view to_string(Mode m) { return m == Mode::major ? "major" : "minor"; }

struct KeySignature {
  int tonic = 0;
  Mode mode = Mode::major;

  /// MusicXML-style circle-of-fifths position (-7..7) plus mode.
  static KeySignature from_fifths(int fifths, Mode mode) {
    const int major_tonic = detail::mod12(fifths * 7);
    return {mode == Mode::major ? major_tonic : detail::mod12(major_tonic + 9), mode};
  }

  /// "C major", "F# minor".
  static KeySignature parse(std::string_view tonic, std::string_view mode) {
    Mode m{};
    if (mode == "major") m = Mode::major;
    else if (mode == "minor") m = Mode::minor;
    else throw ParseError("invalid mode '" + std::string(mode) + "'");
    return {parse_pitch_class(tonic), m};
  }

  /// Major: ionian; minor: natural (aeolian).
  PitchClassSet scale_tones() const {
    static constexpr std::array<int, 7> kMajor = {0, 2, 4, 5, 7, 9, 11};
    static constexpr std::array<int, 7> kMinor = {0, 2, 3, 5, 7, 8, 10};
    PitchClassSet out;
    for (int step : mode == Mode::major ? kMajor : kMinor) out.insert(tonic + step);
    return out;
  }

  std::string name() const {
    // Minor keys spell with sharps apart from E-flat and B-flat minor.
    const bool flats = mode == Mode::major || tonic == 3 || tonic == 10;
    return pitch_class_name(tonic, flats) + " " + std::string(to_string(mode));
  }

  KeySignature transposed(int semitones) const { return {detail::mod12(tonic + semitones), mode}; }

  friend bool operator==(const KeySignature&, const KeySignature&) = default;
};

// ---------------------------------------------------------------------------
// Meter

struct Meter {
  int beats = 4;
  int beat_unit = 4;

  Meter() = default;
  Meter(int beats_, int beat_unit_) : beats(beats_), beat_unit(beat_unit_) {
    if (beats <= 0) throw MelodyError("meter must have a positive beat count");
    switch (beat_unit) {
      case 1: case 2: case 4: case 8: case 16: case 32: break;
      default: throw MelodyError("meter beat unit " + std::to_string(beat_unit) + " is not a power of two <= 32");
    }
  }

  static Meter parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw ParseError("invalid meter '" + std::string(text) + "'");
    try {
      return Meter(std::stoi(std::string(text.substr(0, slash))),
                   std::stoi(std::string(text.substr(slash + 1))));
    } catch (const MelodyError& e) {
      throw ParseError(e.what());
    } catch (const std::exception&) {
      throw ParseError("invalid meter '" + std::string(text) + "'");
    }
  }

  Duration beat_length() const { return Duration(1, beat_unit); }
  Duration bar_length() const { return Duration(beats, beat_unit); }
  std::string to_string() const { return std::to_string(beats) + "/" + std::to_string(beat_unit); }

  friend bool operator==(const Meter&, const Meter&) = default;
};

/// Number of metrical levels (bar, beat, half-beat) whose grid contains `onset`.
/// The bar start scores 3 and is the unique maximum within a bar.
inline int metric_strength(Duration onset, const Meter& meter) {
  const std::array<Duration, 3> levels = {meter.bar_length(), meter.beat_length(),
                                          meter.beat_length() / 2};
  int strength = 0;
  for (const Duration& unit : levels) {
    if (onset.is_multiple_of(unit)) ++strength;
  }
  return strength;
}

// ---------------------------------------------------------------------------
// Notes and melodies

struct Note {
  Pitch pitch{60};
  Duration onset;
  Duration duration;
  bool tie_continuation = false;

  Duration end() const { return onset + duration; }

  friend bool operator==(const Note&, const Note&) = default;
};

struct HarmonySpan {
  Duration onset;
  Duration duration;
  ChordSymbol chord;

  Duration end() const { return onset + duration; }

  friend bool operator==(const HarmonySpan&, const HarmonySpan&) = default;
};

namespace detail {

/// Merges adjacent equal chords and clips the spans to [0, length).
inline std::vector<HarmonySpan> normalize_harmony(std::vector<HarmonySpan> spans, Duration length) {
  std::sort(spans.begin(), spans.end(),
            [](const HarmonySpan& a, const HarmonySpan& b) { return a.onset < b.onset; });
  std::vector<HarmonySpan> out;
  for (auto& s : spans) {
    if (s.onset >= length) break;
    if (s.end() > length) s.duration = length - s.onset;
    if (!out.empty() && out.back().chord == s.chord && out.back().end() == s.onset) {
      out.back().duration += s.duration;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

/// Throws MelodyError unless notes and harmony satisfy the lead-sheet invariants.
inline void check_lead_sheet(const std::vector<Note>& notes, const std::vector<HarmonySpan>& harmony,
                             Duration length) {
  if (notes.empty()) throw MelodyError("empty melody");
  for (std::size_t i = 0; i < notes.size(); ++i) {
    const Note& n = notes[i];
    if (!n.duration.is_positive()) {
      throw MelodyError("note " + std::to_string(i + 1) + " has non-positive duration");
    }
    if (n.onset < Duration{}) throw MelodyError("note " + std::to_string(i + 1) + " has negative onset");
    if (i > 0) {
      const Note& prev = notes[i - 1];
      if (n.onset <= prev.onset) throw MelodyError("notes not strictly ordered at note " + std::to_string(i + 1));
      if (n.onset < prev.end()) {
        throw MelodyError("note " + std::to_string(i + 1) + " at " + n.onset.to_string() +
                          " overlaps the previous note");
      }
    }
    if (n.tie_continuation &&
        (i == 0 || notes[i - 1].end() != n.onset || !(notes[i - 1].pitch == n.pitch))) {
      throw MelodyError("tie continuation at note " + std::to_string(i + 1) +
                        " lacks a preceding note of identical pitch");
    }
  }
  Duration covered;
  for (const auto& span : harmony) {
    if (!span.duration.is_positive()) throw MelodyError("harmony span with non-positive duration");
    if (span.onset != covered) {
      throw MelodyError("harmony gap between " + covered.to_string() + " and " + span.onset.to_string());
    }
    covered = span.end();
  }
  if (covered < length) {
    throw MelodyError("harmony gap: no chord covers " + covered.to_string() + " to " + length.to_string());
  }
}

}  // namespace detail

/// A monophonic lead sheet: notes with key, meter and covering chord spans.
class Melody {
 public:
  Melody(std::vector<Note> notes, KeySignature key, Meter meter, std::vector<HarmonySpan> harmony)
      : notes_(std::move(notes)), key_(key), meter_(meter) {
    const Duration len = notes_.empty() ? Duration{} : notes_.back().end();
    harmony_ = detail::normalize_harmony(std::move(harmony), len);
    detail::check_lead_sheet(notes_, harmony_, len);
  }

  const std::vector<Note>& notes() const { return notes_; }
  const KeySignature& key() const { return key_; }
  const Meter& meter() const { return meter_; }
  const std::vector<HarmonySpan>& harmony() const { return harmony_; }
  Duration length() const { return notes_.back().end(); }

  /// Jointly transposes notes, chords and key.
  Melody transposed(int semitones) const {
    std::vector<Note> notes = notes_;
    for (auto& n : notes) n.pitch = n.pitch.transposed(semitones);
    std::vector<HarmonySpan> harmony = harmony_;
    for (auto& h : harmony) h.chord = h.chord.transposed(semitones);
    return Melody(std::move(notes), key_.transposed(semitones), meter_, std::move(harmony));
  }

  friend bool operator==(const Melody&, const Melody&) = default;

 private:
  std::vector<Note> notes_;
  KeySignature key_;
  Meter meter_;
  std::vector<HarmonySpan> harmony_;
};

/// Chord governing time `t` (the span whose [onset, end) contains t).
inline const ChordSymbol& chord_at(std::span<const HarmonySpan> harmony, Duration t) {
  auto it = std::upper_bound(harmony.begin(), harmony.end(), t,
                             [](Duration v, const HarmonySpan& s) { return v < s.onset; });
  if (it == harmony.begin() || std::prev(it)->end() <= t) {
    throw MelodyError("harmony gap: no chord at " + t.to_string());
  }
  return std::prev(it)->chord;
}

}  // namespace skdiff
