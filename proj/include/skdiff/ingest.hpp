#pragma once

// MusicXML (partwise, uncompressed) ingestion and lead-melody extraction.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "skdiff/error.hpp"
#include "skdiff/pitch_time.hpp"

namespace skdiff {

struct EventNote {
  Pitch pitch{60};
  bool tie_start = false;
  bool tie_stop = false;

  friend bool operator==(const EventNote&, const EventNote&) = default;
};

/// Notes sounding together in one voice (a chord-flagged stack shares one event).
struct NoteEvent {
  Duration onset;  // relative to the measure start
  Duration duration;
  std::vector<EventNote> notes;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct HarmonyMark {
  Duration onset;  // relative to the measure start
  ChordSymbol chord;

  friend bool operator==(const HarmonyMark&, const HarmonyMark&) = default;
};

struct Measure {
  std::string number;
  Duration length;  // furthest point reached by the measure's content
  Meter meter;
  KeySignature key;
  std::vector<NoteEvent> events;
  std::vector<HarmonyMark> harmonies;
  bool implicit = false;
  bool repeat_forward = false;
  bool repeat_backward = false;
};

struct ScorePart {
  std::string part_id;
  std::string name;
  std::vector<Measure> measures;
  Meter meter;      // first time signature
  KeySignature key; // first key signature

  /// True when the first measure is shorter than a full bar.
  bool has_pickup() const {
    return !measures.empty() && measures.front().length < measures.front().meter.bar_length();
  }
};

enum class AnacrusisMode { pad, drop };

struct ExtractOptions {
  AnacrusisMode anacrusis = AnacrusisMode::pad;
};

namespace detail {

using boost::property_tree::ptree;

inline int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("invalid " + what + " '" + text + "'");
  }
}

inline std::string trimmed(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

inline std::optional<ChordQuality> harmony_kind(std::string_view kind) {
  static const std::map<std::string_view, ChordQuality> kKinds = {
      {"major", ChordQuality::major},
      {"minor", ChordQuality::minor},
      {"dominant", ChordQuality::dominant7},
      {"dominant-seventh", ChordQuality::dominant7},
      {"major-seventh", ChordQuality::major7},
      {"minor-seventh", ChordQuality::minor7},
      {"diminished", ChordQuality::diminished},
      {"augmented", ChordQuality::augmented},
  };
  auto it = kKinds.find(kind);
  if (it == kKinds.end()) return std::nullopt;
  return it->second;
}

class MusicXmlReader {
 public:
  explicit MusicXmlReader(std::vector<std::string>* warnings) : warnings_(warnings) {}

  std::vector<ScorePart> read(const ptree& doc) {
    auto root = doc.get_child_optional("score-partwise");
    if (!root) throw ParseError("document root is not <score-partwise>");

    std::map<std::string, std::string> names;
    if (auto list = root->get_child_optional("part-list")) {
      for (const auto& [tag, node] : *list) {
        if (tag != "score-part") continue;
        const std::string id = node.get<std::string>("<xmlattr>.id", "");
        names[id] = node.get<std::string>("part-name", "");
      }
    }

    std::vector<ScorePart> parts;
    for (const auto& [tag, node] : *root) {
      if (tag == "part") parts.push_back(read_part(node, names));
      else if (tag != "part-list" && tag != "<xmlattr>" && tag != "<xmlcomment>") warn_unknown(tag);
    }
    if (parts.empty()) throw ParseError("document contains no <part>");
    return parts;
  }

 private:
  void warn(std::string message) {
    if (warnings_ && reported_.insert(message).second) warnings_->push_back(std::move(message));
  }
  void warn_unknown(const std::string& tag) { warn("ignored unsupported element <" + tag + ">"); }

  Duration divisions_to_duration(const std::string& text) const {
    return Duration(parse_int(trimmed(text), "duration"), static_cast<std::int64_t>(divisions_) * 4);
  }

  ScorePart read_part(const ptree& node, const std::map<std::string, std::string>& names) {
    ScorePart part;
    part.part_id = node.get<std::string>("<xmlattr>.id", "");
    if (auto it = names.find(part.part_id); it != names.end()) part.name = it->second;
    divisions_ = 1;
    meter_.reset();
    key_.reset();

    for (const auto& [tag, measure] : node) {
      if (tag == "measure") part.measures.push_back(read_measure(measure));
      else if (tag != "<xmlattr>" && tag != "<xmlcomment>") warn_unknown(tag);
    }
    if (part.measures.empty()) throw ParseError("part '" + part.part_id + "' has no measures");
    check_lengths(part);
    part.meter = part.measures.front().meter;
    part.key = part.measures.front().key;
    return part;
  }

  Measure read_measure(const ptree& node) {
    Measure m;
    m.number = node.get<std::string>("<xmlattr>.number", "");
    m.implicit = node.get<std::string>("<xmlattr>.implicit", "no") == "yes";
    Duration cursor;
    Duration furthest;
    Duration last_onset;

    for (const auto& [tag, child] : node) {
      if (tag == "attributes") {
        read_attributes(child);
      } else if (tag == "note") {
        read_note(child, m, cursor, last_onset);
      } else if (tag == "backup") {
        cursor -= divisions_to_duration(child.get<std::string>("duration", "0"));
        if (cursor < Duration{}) throw ParseError("measure " + m.number + ": <backup> moves before the measure start");
      } else if (tag == "forward") {
        cursor += divisions_to_duration(child.get<std::string>("duration", "0"));
      } else if (tag == "harmony") {
        read_harmony(child, m, cursor);
      } else if (tag == "barline") {
        if (auto rep = child.get_child_optional("repeat")) {
          const std::string dir = rep->get<std::string>("<xmlattr>.direction", "");
          if (dir == "forward") m.repeat_forward = true;
          if (dir == "backward") m.repeat_backward = true;
        }
      } else if (tag != "<xmlattr>" && tag != "<xmlcomment>" && tag != "print" && tag != "direction" &&
                 tag != "sound") {
        warn_unknown(tag);
      }
      furthest = std::max(furthest, cursor);
    }

    if (!meter_) {
      warn("no time signature; assuming 4/4");
      meter_ = Meter(4, 4);
    }
    if (!key_) {
      warn("no key signature; assuming C major");
      key_ = KeySignature{0, Mode::major};
    }
    m.meter = *meter_;
    m.key = *key_;
    m.length = furthest;
    return m;
  }

  void read_attributes(const ptree& node) {
    if (auto d = node.get_optional<std::string>("divisions")) {
      divisions_ = parse_int(trimmed(*d), "divisions");
      if (divisions_ <= 0) throw ParseError("divisions must be positive");
    }
    if (auto k = node.get_child_optional("key")) {
      const int fifths = parse_int(trimmed(k->get<std::string>("fifths", "0")), "key fifths");
      const std::string mode = trimmed(k->get<std::string>("mode", "major"));
      key_ = KeySignature::from_fifths(fifths, mode == "minor" ? Mode::minor : Mode::major);
    }
    if (auto t = node.get_child_optional("time")) {
      const std::string beats = trimmed(t->get<std::string>("beats", ""));
      const std::string unit = trimmed(t->get<std::string>("beat-type", ""));
      try {
        meter_ = Meter(parse_int(beats, "time beats"), parse_int(unit, "beat type"));
      } catch (const MelodyError& e) {
        throw ParseError(e.what());
      }
    }
  }

  void read_note(const ptree& node, Measure& m, Duration& cursor, Duration& last_onset) {
    if (node.get_child_optional("grace")) {
      warn("dropped grace note(s)");
      return;
    }
    if (node.get_child_optional("cue")) {
      warn("dropped cue note(s)");
      return;
    }
    const Duration dur = divisions_to_duration(node.get<std::string>("duration", "0"));
    const bool chord = node.get_child_optional("chord").has_value();
    const Duration onset = chord ? last_onset : cursor;

    if (node.get_child_optional("rest")) {
      if (!chord) cursor += dur;
      last_onset = onset;
      return;
    }
    auto pitch = node.get_child_optional("pitch");
    if (!pitch) {
      warn("dropped unpitched note(s)");
      if (!chord) cursor += dur;
      return;
    }
    const std::string step = trimmed(pitch->get<std::string>("step", ""));
    if (step.size() != 1) throw ParseError("measure " + m.number + ": invalid pitch step '" + step + "'");
    const int alter = parse_int(trimmed(pitch->get<std::string>("alter", "0")), "alter");
    const int octave = parse_int(trimmed(pitch->get<std::string>("octave", "")), "octave");

    EventNote en{Pitch(SpelledPitch{step[0], alter, octave})};
    for (const auto& [tag, child] : node) {
      if (tag != "tie") continue;
      const std::string type = child.get<std::string>("<xmlattr>.type", "");
      if (type == "start") en.tie_start = true;
      if (type == "stop") en.tie_stop = true;
    }

    if (chord && !m.events.empty() && m.events.back().onset == onset) {
      m.events.back().notes.push_back(en);
    } else {
      m.events.push_back({onset, dur, {en}});
    }
    if (!chord) cursor += dur;
    last_onset = onset;
  }

  void read_harmony(const ptree& node, Measure& m, Duration cursor) {
    const std::string kind = trimmed(node.get<std::string>("kind", ""));
    const auto quality = harmony_kind(kind);
    if (!quality) throw ParseError("measure " + m.number + ": unsupported harmony kind '" + kind + "'");
    const std::string step = trimmed(node.get<std::string>("root.root-step", ""));
    if (step.size() != 1) throw ParseError("measure " + m.number + ": harmony without a root step");
    const int alter = parse_int(trimmed(node.get<std::string>("root.root-alter", "0")), "root-alter");
    Duration onset = cursor;
    if (auto off = node.get_optional<std::string>("offset")) onset += divisions_to_duration(*off);
    m.harmonies.push_back({onset, ChordSymbol{mod12(step_pitch_class(step[0]) + alter), *quality}});
  }

  // A measure may fall short of its bar only as a pickup, as the closing
  // complement of a pickup, when marked implicit, or next to a repeat barline.
  static void check_lengths(const ScorePart& part) {
    for (std::size_t i = 0; i < part.measures.size(); ++i) {
      const Measure& m = part.measures[i];
      const Duration bar = m.meter.bar_length();
      if (m.length > bar) {
        throw ParseError("measure " + m.number + " lasts " + m.length.to_string() + ", longer than its " +
                         m.meter.to_string() + " bar");
      }
      if (m.length == bar) continue;
      const bool edge = i == 0 || i + 1 == part.measures.size();
      const bool near_repeat = m.repeat_backward || m.repeat_forward ||
                               (i + 1 < part.measures.size() && part.measures[i + 1].repeat_forward) ||
                               (i > 0 && part.measures[i - 1].repeat_backward);
      if (!edge && !m.implicit && !near_repeat) {
        throw ParseError("measure " + m.number + " lasts " + m.length.to_string() + ", shorter than its " +
                         m.meter.to_string() + " bar");
      }
    }
  }

  std::vector<std::string>* warnings_;
  std::set<std::string> reported_;
  int divisions_ = 1;
  std::optional<Meter> meter_;
  std::optional<KeySignature> key_;
};

}  // namespace detail

/// Parses an uncompressed partwise MusicXML document. Unsupported elements are
/// skipped and reported once each through `warnings` when provided.
inline std::vector<ScorePart> parse_musicxml(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  boost::property_tree::ptree doc;
  try {
    boost::property_tree::read_xml(in, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), e.line());
  }
  return detail::MusicXmlReader(warnings).read(doc);
}

inline std::vector<ScorePart> parse_musicxml(std::string_view text, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in{std::string(text)};
  return parse_musicxml(in, warnings);
}

/// Absorbs rests: each gap extends the preceding note, a leading gap extends the
/// first note back to 0, and a trailing gap up to `total` extends the last note.
inline std::vector<Note> absorb_rests(std::vector<Note> notes, Duration total) {
  if (notes.empty()) return notes;
  if (notes.front().onset.is_positive()) {
    notes.front().duration += notes.front().onset;
    notes.front().onset = Duration{};
  }
  for (std::size_t i = 0; i + 1 < notes.size(); ++i) {
    if (notes[i].end() < notes[i + 1].onset) notes[i].duration = notes[i + 1].onset - notes[i].onset;
  }
  if (notes.back().end() < total) notes.back().duration = total - notes.back().onset;
  return notes;
}

/// Monophonic lead melody of one part: highest simultaneous pitch, ties merged,
/// rests absorbed, harmony carried until the next chord.
inline Melody extract_lead(const std::vector<ScorePart>& parts, std::size_t part_index = 0,
                           const ExtractOptions& options = {}) {
  if (part_index >= parts.size()) {
    throw MelodyError("part " + std::to_string(part_index + 1) + " does not exist (score has " +
                      std::to_string(parts.size()) + ")");
  }
  const ScorePart& part = parts[part_index];

  // Measure start times, with the pickup padded to a full bar or dropped.
  auto measure_starts = [&](const ScorePart& p, std::size_t& first) {
    std::vector<Duration> starts(p.measures.size());
    Duration t;
    first = 0;
    if (p.has_pickup()) {
      if (options.anacrusis == AnacrusisMode::drop) first = 1;
      else t = p.measures.front().meter.bar_length() - p.measures.front().length;
    }
    for (std::size_t i = first; i < p.measures.size(); ++i) {
      starts[i] = t;
      t += p.measures[i].length;
    }
    // A short closing bar is filled out to the barline.
    const Duration bar = p.measures.back().meter.bar_length();
    if (!t.is_multiple_of(bar)) t = t.floor_to(bar) + bar;
    return std::pair{starts, t};
  };

  std::size_t first = 0;
  const auto [starts, total] = measure_starts(part, first);

  struct Candidate {
    Note note;
    bool tie_start;
  };
  std::map<Duration, Candidate> by_onset;
  for (std::size_t i = first; i < part.measures.size(); ++i) {
    for (const NoteEvent& ev : part.measures[i].events) {
      auto top = std::max_element(ev.notes.begin(), ev.notes.end(),
                                  [](const EventNote& a, const EventNote& b) { return a.pitch.midi() < b.pitch.midi(); });
      const Duration onset = starts[i] + ev.onset;
      auto it = by_onset.find(onset);
      if (it == by_onset.end() || it->second.note.pitch.midi() < top->pitch.midi()) {
        by_onset.insert_or_assign(onset, Candidate{{top->pitch, onset, ev.duration, false}, top->tie_start});
      }
    }
  }
  if (by_onset.empty()) throw MelodyError("part " + std::to_string(part_index + 1) + " has no notes: empty melody");

  std::vector<Candidate> seq;
  for (auto& [onset, c] : by_onset) seq.push_back(c);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i].note.end() > seq[i + 1].note.onset) seq[i].note.duration = seq[i + 1].note.onset - seq[i].note.onset;
  }

  std::vector<Note> notes;
  bool open_tie = false;
  for (const Candidate& c : seq) {
    if (open_tie && !notes.empty() && notes.back().pitch == c.note.pitch && notes.back().end() == c.note.onset) {
      notes.back().duration += c.note.duration;
    } else {
      notes.push_back(c.note);
    }
    open_tie = c.tie_start;
  }
  notes = absorb_rests(std::move(notes), total);

  auto harmony_of = [&](const ScorePart& p) {
    std::size_t f = 0;
    const std::vector<Duration> st = measure_starts(p, f).first;
    std::vector<std::pair<Duration, ChordSymbol>> marks;
    for (std::size_t i = f; i < p.measures.size(); ++i) {
      for (const HarmonyMark& h : p.measures[i].harmonies) marks.emplace_back(st[i] + h.onset, h.chord);
    }
    std::stable_sort(marks.begin(), marks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return marks;
  };
  auto marks = harmony_of(part);
  for (std::size_t i = 0; marks.empty() && i < parts.size(); ++i) {
    if (i != part_index) marks = harmony_of(parts[i]);
  }
  if (marks.empty()) throw MelodyError("harmony gap: the score carries no chord annotations");

  std::vector<HarmonySpan> harmony;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const Duration on = i == 0 ? Duration{} : marks[i].first;
    const Duration off = i + 1 < marks.size() ? marks[i + 1].first : total;
    if (off > on) harmony.push_back({on, off - on, marks[i].second});
  }
  const Measure& head = part.measures[std::min(first, part.measures.size() - 1)];
  return Melody(std::move(notes), head.key, head.meter, std::move(harmony));
}

}  // namespace skdiff
