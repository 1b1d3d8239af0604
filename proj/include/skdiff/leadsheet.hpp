#pragma once

// Line-oriented plain-text lead sheets (.lsht):
//
//   key C major
//   meter 2/4
//   chords | C | G7 |
//   notes C4:q D4:q E4:h~ E4:e r:e
//
// Chord cells hold one symbol per bar, or several symbols splitting the bar
// equally; "." continues the previous chord. Durations are w h q e s with an
// optional dot; "~" ties a note to the next one and "r" is a rest, absorbed
// into the preceding note. Blank lines and lines starting with '#' are ignored.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "skdiff/error.hpp"
#include "skdiff/ingest.hpp"
#include "skdiff/pitch_time.hpp"

namespace skdiff {

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> split_tokens(std::string_view line, std::size_t from) {
  std::vector<Token> out;
  std::size_t i = from;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline Duration duration_token(std::string_view text, std::size_t line, std::size_t column) {
  if (text.empty() || text.size() > 2 || (text.size() == 2 && text[1] != '.')) {
    throw ParseError("invalid duration '" + std::string(text) + "'", line, column);
  }
  Duration base;
  switch (text[0]) {
    case 'w': base = Duration(1, 1); break;
    case 'h': base = Duration(1, 2); break;
    case 'q': base = Duration(1, 4); break;
    case 'e': base = Duration(1, 8); break;
    case 's': base = Duration(1, 16); break;
    default: throw ParseError("invalid duration '" + std::string(text) + "'", line, column);
  }
  return text.size() == 2 ? base * 3 / 2 : base;
}

/// Greedy decomposition into token durations, longest first.
inline std::vector<std::string> duration_tokens(Duration d) {
  static const std::array<std::pair<std::string_view, Duration>, 10> kTokens = {{
      {"w.", Duration(3, 2)}, {"w", Duration(1, 1)}, {"h.", Duration(3, 4)}, {"h", Duration(1, 2)},
      {"q.", Duration(3, 8)}, {"q", Duration(1, 4)}, {"e.", Duration(3, 16)}, {"e", Duration(1, 8)},
      {"s.", Duration(3, 32)}, {"s", Duration(1, 16)},
  }};
  std::vector<std::string> out;
  while (d.is_positive()) {
    auto it = std::find_if(kTokens.begin(), kTokens.end(), [&](const auto& t) { return t.second <= d; });
    if (it == kTokens.end()) throw Error("duration " + d.to_string() + " cannot be written with w h q e s tokens");
    out.emplace_back(it->first);
    d -= it->second;
  }
  return out;
}

}  // namespace detail

inline Melody parse_leadsheet_text(std::string_view text) {
  std::optional<KeySignature> key;
  std::optional<Meter> meter;
  std::vector<Note> notes;
  std::vector<std::pair<Duration, std::optional<ChordSymbol>>> chord_cells;  // (width, symbol or continue)
  bool tie_pending = false;
  std::size_t tie_line = 0;
  Duration cursor;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto tokens = detail::split_tokens(line, 0);
    if (tokens.empty() || tokens.front().text.front() == '#') continue;
    const std::string_view directive = tokens.front().text;

    if (directive == "key") {
      if (tokens.size() != 3) throw ParseError("expected 'key <tonic> <mode>'", line_no, tokens.front().column);
      try {
        key = KeySignature::parse(tokens[1].text, tokens[2].text);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no, tokens[1].column);
      }
    } else if (directive == "meter") {
      if (tokens.size() != 2) throw ParseError("expected 'meter <n>/<d>'", line_no, tokens.front().column);
      try {
        meter = Meter::parse(tokens[1].text);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no, tokens[1].column);
      }
    } else if (directive == "chords") {
      if (!meter) throw ParseError("'chords' before 'meter'", line_no, tokens.front().column);
      const std::size_t body = tokens.front().column - 1 + directive.size();
      std::size_t cell_start = line.find('|', body);
      if (cell_start == std::string_view::npos || !detail::trimmed(std::string(line.substr(body, cell_start - body))).empty()) {
        throw ParseError("chord cells must be delimited by '|'", line_no, body + 1);
      }
      while (true) {
        const std::size_t cell_end = line.find('|', cell_start + 1);
        if (cell_end == std::string_view::npos) {
          if (!detail::trimmed(std::string(line.substr(cell_start + 1))).empty()) {
            throw ParseError("unterminated chord cell", line_no, cell_start + 2);
          }
          break;
        }
        const auto symbols = detail::split_tokens(line.substr(0, cell_end), cell_start + 1);
        if (symbols.empty()) throw ParseError("empty chord cell", line_no, cell_start + 1);
        const Duration width = meter->bar_length() / static_cast<std::int64_t>(symbols.size());
        for (const auto& sym : symbols) {
          if (sym.text == ".") {
            if (chord_cells.empty()) throw ParseError("'.' with no previous chord", line_no, sym.column);
            chord_cells.emplace_back(width, std::nullopt);
            continue;
          }
          try {
            chord_cells.emplace_back(width, ChordSymbol::parse(sym.text));
          } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no, sym.column);
          }
        }
        cell_start = cell_end;
      }
    } else if (directive == "notes") {
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        std::string_view tok = tokens[t].text;
        const std::size_t col = tokens[t].column;
        const bool tie = !tok.empty() && tok.back() == '~';
        if (tie) tok.remove_suffix(1);
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) throw ParseError("expected '<pitch>:<duration>'", line_no, col);
        const Duration dur = detail::duration_token(tok.substr(colon + 1), line_no, col + colon + 1);
        const std::string_view name = tok.substr(0, colon);
        if (name == "r") {
          if (tie) throw ParseError("a rest cannot be tied", line_no, col);
          if (tie_pending) throw ParseError("tie into a rest", line_no, col);
          cursor += dur;
          continue;
        }
        std::optional<Pitch> pitch;
        try {
          pitch = Pitch::parse(name);
        } catch (const Error& e) {
          throw ParseError(e.what(), line_no, col);
        }
        if (tie_pending) {
          if (!(notes.back().pitch == *pitch) || notes.back().end() != cursor) {
            throw ParseError("tie joins different pitches", line_no, col);
          }
          notes.back().duration += dur;
        } else {
          notes.push_back({*pitch, cursor, dur, false});
        }
        cursor += dur;
        tie_pending = tie;
        tie_line = line_no;
      }
    } else {
      throw ParseError("unknown directive '" + std::string(directive) + "'", line_no, tokens.front().column);
    }
  }

  if (tie_pending) throw ParseError("tie at the end of the melody", tie_line);
  if (!key) throw ParseError("missing 'key' directive");
  if (!meter) throw ParseError("missing 'meter' directive");
  if (notes.empty()) throw MelodyError("empty melody: no notes");

  std::vector<HarmonySpan> harmony;
  Duration at;
  for (const auto& [width, chord] : chord_cells) {
    if (chord) harmony.push_back({at, width, *chord});
    else harmony.back().duration += width;
    at += width;
  }
  return Melody(absorb_rests(std::move(notes), cursor), *key, *meter, std::move(harmony));
}

/// Canonical text form; parse_leadsheet_text(format_leadsheet_text(m)) == m.
inline std::string format_leadsheet_text(const Melody& m) {
  std::ostringstream out;
  out << "key " << m.key().name() << "\n";
  out << "meter " << m.meter().to_string() << "\n";

  const Duration bar = m.meter().bar_length();
  const auto& harmony = m.harmony();
  out << "chords |";
  for (Duration start; start < m.length(); start += bar) {
    const Duration stop = start + bar;
    int cells = 1;
    for (; cells <= 64; ++cells) {
      const Duration width = bar / cells;
      const bool ok = std::all_of(harmony.begin(), harmony.end(), [&](const HarmonySpan& h) {
        return h.onset <= start || h.onset >= stop || (h.onset - start).is_multiple_of(width);
      });
      if (ok) break;
    }
    if (cells > 64) throw Error("harmony rhythm too fine to write as chord cells");
    for (int c = 0; c < cells; ++c) {
      const Duration t = start + bar / cells * c;
      auto it = std::find_if(harmony.begin(), harmony.end(), [&](const HarmonySpan& h) { return h.onset == t; });
      out << " " << (it != harmony.end() ? it->chord.name() : std::string("."));
    }
    out << " |";
  }
  out << "\n";

  out << "notes";
  for (const Note& n : m.notes()) {
    const auto parts = detail::duration_tokens(n.duration);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      out << " " << n.pitch.name() << ":" << parts[i] << (i + 1 < parts.size() ? "~" : "");
    }
  }
  out << "\n";
  return out.str();
}

}  // namespace skdiff
