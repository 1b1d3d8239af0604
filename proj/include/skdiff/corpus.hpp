#pragma once

// Registry of the 24-allemande corpus and a validator for its structural
// regularities. The corpus files themselves are downloaded separately.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "skdiff/error.hpp"
#include "skdiff/ingest.hpp"
#include "skdiff/pitch_time.hpp"

namespace skdiff {

enum class RepeatForm { ABA, AABB, AABBA };

// The four minor-mode B sections are not identified by piece, so every record
// stays unverified until checked against the scores.
enum class ModeOfB { close_major_tonality, minor_mode, unverified };

inline std::string_view to_string(RepeatForm f) {
  switch (f) {
    case RepeatForm::ABA: return "ABA";
    case RepeatForm::AABB: return "AABB";
    case RepeatForm::AABBA: return "AABBA";
  }
  return "ABA";
}

inline std::string_view to_string(ModeOfB m) {
  switch (m) {
    case ModeOfB::close_major_tonality: return "close_major_tonality";
    case ModeOfB::minor_mode: return "minor_mode";
    case ModeOfB::unverified: return "unverified";
  }
  return "unverified";
}

inline constexpr std::string_view kUnknownTitle = "unknown";

struct PieceRecord {
  int number = 0;
  std::string numeral;
  std::string title_adjective{kUnknownTitle};
  Meter meter{2, 4};
  int section_a_bars = 8;
  int section_b_bars = 8;
  RepeatForm repeat_form = RepeatForm::ABA;
  ModeOfB mode_of_b = ModeOfB::unverified;
  bool has_anacrusis = false;
  std::string file_name;

  /// Bars when every repeat is written out.
  int expanded_bars() const {
    switch (repeat_form) {
      case RepeatForm::ABA: return 2 * section_a_bars + section_b_bars;
      case RepeatForm::AABB: return 2 * section_a_bars + 2 * section_b_bars;
      case RepeatForm::AABBA: return 3 * section_a_bars + 2 * section_b_bars;
    }
    return 0;
  }

  friend bool operator==(const PieceRecord&, const PieceRecord&) = default;
};

struct CorpusManifest {
  std::vector<PieceRecord> records;
  std::string source_doi;

  const PieceRecord* find(int number) const {
    auto it = std::find_if(records.begin(), records.end(), [&](const PieceRecord& r) { return r.number == number; });
    return it == records.end() ? nullptr : &*it;
  }

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

// Same content as data/corpus_manifest.txt.
inline constexpr std::string_view kEmbeddedManifest = R"(# Allemande corpus manifest
# columns: numeral meter a_bars b_bars form mode_of_b anacrusis file title
doi 10.5281/zenodo.5118650
piece I      2/4 8  8  ABA   unverified no  allemande_I.musicxml      unknown
piece II     2/4 8  8  ABA   unverified no  allemande_II.musicxml     unknown
piece III    2/4 8  8  ABA   unverified no  allemande_III.musicxml    unknown
piece IV     2/4 8  8  AABB  unverified no  allemande_IV.musicxml     unknown
piece V      2/4 8  8  ABA   unverified no  allemande_V.musicxml      unknown
piece VI     2/4 8  8  ABA   unverified no  allemande_VI.musicxml     unknown
piece VII    3/8 8  8  ABA   unverified no  allemande_VII.musicxml    unknown
piece VIII   2/4 8  8  ABA   unverified yes allemande_VIII.musicxml   unknown
piece IX     3/8 8  8  ABA   unverified no  allemande_IX.musicxml     unknown
piece X      2/4 8  8  ABA   unverified no  allemande_X.musicxml      unknown
piece XI     2/4 12 8  ABA   unverified no  allemande_XI.musicxml     unknown
piece XII    2/4 8  8  ABA   unverified no  allemande_XII.musicxml    unknown
piece XIII   2/4 8  8  ABA   unverified no  allemande_XIII.musicxml   unknown
piece XIV    2/4 4  4  ABA   unverified no  allemande_XIV.musicxml    unknown
piece XV     2/4 8  8  ABA   unverified no  allemande_XV.musicxml     unknown
piece XVI    2/4 8  8  ABA   unverified no  allemande_XVI.musicxml    unknown
piece XVII   2/4 8  8  ABA   unverified no  allemande_XVII.musicxml   unknown
piece XVIII  3/8 8  8  AABBA unverified no  allemande_XVIII.musicxml  unknown
piece XIX    3/8 16 24 ABA   unverified no  allemande_XIX.musicxml    unknown
piece XX     2/4 8  8  ABA   unverified no  allemande_XX.musicxml     unknown
piece XXI    2/4 8  4  ABA   unverified no  allemande_XXI.musicxml    unknown
piece XXII   2/4 8  8  ABA   unverified no  allemande_XXII.musicxml   unknown
piece XXIII  2/4 8  8  ABA   unverified no  allemande_XXIII.musicxml  unknown
piece XXIV   2/4 8  8  ABA   unverified no  allemande_XXIV.musicxml   unknown
)";

inline std::optional<int> roman_to_int(std::string_view s) {
  static constexpr std::array<std::string_view, 24> kNumerals = {
      "I",    "II",  "III",  "IV",  "V",    "VI",    "VII",  "VIII", "IX",    "X",   "XI",   "XII",
      "XIII", "XIV", "XV",   "XVI", "XVII", "XVIII", "XIX",  "XX",   "XXI",   "XXII", "XXIII", "XXIV"};
  for (std::size_t i = 0; i < kNumerals.size(); ++i) {
    if (kNumerals[i] == s) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

/// Parses the structured-text manifest format (see data/corpus_manifest.txt).
inline CorpusManifest parse_manifest(std::string_view text) {
  CorpusManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head) || head.front() == '#') continue;
    if (head == "doi") {
      fields >> m.source_doi;
      continue;
    }
    if (head != "piece") throw ParseError("unknown manifest entry '" + head + "'", line_no);
    PieceRecord r;
    std::string meter, form, mode, pickup;
    if (!(fields >> r.numeral >> meter >> r.section_a_bars >> r.section_b_bars >> form >> mode >> pickup >> r.file_name)) {
      throw ParseError("incomplete piece record", line_no);
    }
    std::getline(fields >> std::ws, r.title_adjective);
    if (r.title_adjective.empty()) r.title_adjective = kUnknownTitle;
    const auto number = roman_to_int(r.numeral);
    if (!number) throw ParseError("invalid piece numeral '" + r.numeral + "'", line_no);
    r.number = *number;
    r.meter = Meter::parse(meter);
    if (form == "ABA") r.repeat_form = RepeatForm::ABA;
    else if (form == "AABB") r.repeat_form = RepeatForm::AABB;
    else if (form == "AABBA") r.repeat_form = RepeatForm::AABBA;
    else throw ParseError("invalid repeat form '" + form + "'", line_no);
    if (mode == "close_major_tonality") r.mode_of_b = ModeOfB::close_major_tonality;
    else if (mode == "minor_mode") r.mode_of_b = ModeOfB::minor_mode;
    else if (mode == "unverified") r.mode_of_b = ModeOfB::unverified;
    else throw ParseError("invalid mode_of_b '" + mode + "'", line_no);
    if (pickup != "yes" && pickup != "no") throw ParseError("anacrusis must be yes or no", line_no);
    r.has_anacrusis = pickup == "yes";
    if (m.find(r.number)) throw ParseError("duplicate piece " + r.numeral, line_no);
    m.records.push_back(std::move(r));
  }
  return m;
}

inline CorpusManifest load_manifest() { return parse_manifest(kEmbeddedManifest); }

/// Retrieval instructions. Constant text; no network access happens here.
inline std::string fetch_instructions(const CorpusManifest& manifest = load_manifest()) {
  std::ostringstream out;
  out << "Allemande corpus: " << manifest.records.size() << " pieces for mandolin duo, MusicXML\n"
      << "DOI:      " << manifest.source_doi << "\n"
      << "Download: https://doi.org/" << manifest.source_doi << "\n\n"
      << "Place the uncompressed MusicXML files in one directory. Files are matched to\n"
      << "pieces by a roman numeral (or plain number) token in the file name; the\n"
      << "expected names are:\n";
  for (const PieceRecord& r : manifest.records) out << "  " << r.file_name << "\n";
  out << "\nThen run: skdiff validate-corpus <dir>\n";
  return out.str();
}

/// Piece number encoded in a corpus file name, e.g. "allemande_XIV.musicxml" or "leone-14.xml".
inline std::optional<int> piece_number_for_file(const std::filesystem::path& file) {
  const std::string stem = file.stem().string();
  std::optional<int> found;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string upper = token;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    std::optional<int> n = roman_to_int(upper);
    if (!n && std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); }) &&
        token.size() <= 3) {
      const int v = std::stoi(token);
      if (v >= 1 && v <= 24) n = v;
    }
    if (n) found = n;
    token.clear();
  };
  for (char c : stem) {
    if (std::isalnum(static_cast<unsigned char>(c))) token += c;
    else flush();
  }
  flush();
  return found;
}

// ---------------------------------------------------------------------------
// Validation

enum class CheckStatus { pass, fail, skip };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "skip";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  std::string detail;
};

struct PieceValidation {
  int number = 0;
  std::string numeral;
  bool present = false;
  std::vector<CheckResult> checks;

  bool failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
  }
};

/// One aggregate claim: how many pieces the manifest expects versus how many the
/// present files exhibit. `complete` is false unless every piece was present.
struct AggregateTally {
  std::string claim;
  int expected = 0;
  int observed = 0;
  bool measured = true;  // false when the value can only come from the manifest
};

struct ValidationReport {
  std::vector<PieceValidation> pieces;
  std::vector<AggregateTally> tallies;
  int present = 0;
  int skipped = 0;
  int failed = 0;
  bool complete = false;

  bool ok() const { return failed == 0; }

  int failures_of(std::string_view check) const {
    int n = 0;
    for (const auto& p : pieces) {
      for (const auto& c : p.checks) n += c.name == check && c.status == CheckStatus::fail;
    }
    return n;
  }
};

namespace detail {

inline int max_simultaneous(const ScorePart& part) {
  int worst = 0;
  for (const Measure& m : part.measures) {
    for (const NoteEvent& probe : m.events) {
      int sounding = 0;
      for (const NoteEvent& ev : m.events) {
        if (ev.onset <= probe.onset && probe.onset < ev.onset + ev.duration) sounding += static_cast<int>(ev.notes.size());
      }
      worst = std::max(worst, sounding);
    }
  }
  return worst;
}

inline int rounded_bars(Duration d, Duration bar) {
  const auto q = d / bar;
  return static_cast<int>(std::floor(static_cast<double>(q.numerator()) / static_cast<double>(q.denominator()) + 0.5));
}

/// Section lengths in bars from repeat barlines; empty when the part has none.
inline std::vector<int> sections_from_repeats(const ScorePart& part) {
  std::vector<Duration> bounds{Duration{}};
  Duration t;
  bool any = false;
  for (const Measure& m : part.measures) {
    if (m.repeat_forward) {
      bounds.push_back(t);
      any = true;
    }
    t += m.length;
    if (m.repeat_backward) {
      bounds.push_back(t);
      any = true;
    }
  }
  if (!any) return {};
  bounds.push_back(t);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  std::vector<int> out;
  const Duration bar = part.meter.bar_length();
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    const int bars = rounded_bars(bounds[i] - bounds[i - 1], bar);
    if (bars > 0) out.push_back(bars);
  }
  return out;
}

inline CheckResult check_sections(const PieceRecord& r, const ScorePart& part) {
  const std::vector<int> sections = sections_from_repeats(part);
  const std::string expected = std::to_string(r.section_a_bars) + "+" + std::to_string(r.section_b_bars);
  if (sections.size() >= 2) {
    const bool ok = sections[0] == r.section_a_bars && sections[1] == r.section_b_bars;
    return {"section_lengths", ok ? CheckStatus::pass : CheckStatus::fail,
            "repeat sections " + std::to_string(sections[0]) + "+" + std::to_string(sections[1]) + ", expected " + expected};
  }
  Duration total;
  for (const Measure& m : part.measures) total += m.length;
  const int bars = rounded_bars(total, part.meter.bar_length());
  const int written = r.section_a_bars + r.section_b_bars;
  const bool ok = bars == written || bars == r.expanded_bars();
  return {"section_lengths", ok ? CheckStatus::pass : CheckStatus::fail,
          std::to_string(bars) + " bars written, expected " + std::to_string(written) + " or " +
              std::to_string(r.expanded_bars()) + " (sections " + expected + " from manifest)"};
}

}  // namespace detail

/// Checks each present piece against its manifest record. Pieces missing from
/// `pieces` are skipped; `parse_errors` marks pieces whose files did not parse.
inline ValidationReport validate_regularities(const CorpusManifest& manifest,
                                              const std::map<int, std::vector<ScorePart>>& pieces,
                                              const std::map<int, std::string>& parse_errors = {}) {
  ValidationReport report;
  int sections_8_8 = 0, form_aba = 0, meter_2_4 = 0, major = 0;

  for (const PieceRecord& r : manifest.records) {
    PieceValidation pv{r.number, r.numeral, false, {}};
    if (auto err = parse_errors.find(r.number); err != parse_errors.end()) {
      pv.present = true;
      pv.checks.push_back({"parse", CheckStatus::fail, err->second});
    } else if (auto it = pieces.find(r.number); it != pieces.end()) {
      pv.present = true;
      const auto& parts = it->second;
      pv.checks.push_back({"part_count", parts.size() == 2 ? CheckStatus::pass : CheckStatus::fail,
                           std::to_string(parts.size()) + " parts, expected 2"});
      if (!parts.empty()) {
        bool meter_ok = true;
        for (const ScorePart& p : parts) meter_ok = meter_ok && p.meter == r.meter;
        pv.checks.push_back({"meter", meter_ok ? CheckStatus::pass : CheckStatus::fail,
                             parts.front().meter.to_string() + ", expected " + r.meter.to_string()});
        int worst = 0;
        for (const ScorePart& p : parts) worst = std::max(worst, detail::max_simultaneous(p));
        pv.checks.push_back({"simultaneous_notes", worst <= 4 ? CheckStatus::pass : CheckStatus::fail,
                             "at most " + std::to_string(worst) + " simultaneous notes per part, limit 4"});
        const bool is_major = parts.front().key.mode == Mode::major;
        pv.checks.push_back({"major_key", is_major ? CheckStatus::pass : CheckStatus::fail, parts.front().key.name()});
        const CheckResult sections = detail::check_sections(r, parts.front());
        pv.checks.push_back(sections);

        meter_2_4 += parts.front().meter == Meter(2, 4);
        major += is_major;
        sections_8_8 += sections.status == CheckStatus::pass && r.section_a_bars == 8 && r.section_b_bars == 8;
      }
      form_aba += r.repeat_form == RepeatForm::ABA;
    } else {
      pv.checks.push_back({"present", CheckStatus::skip, "file not found"});
    }
    if (pv.present) ++report.present;
    else ++report.skipped;
    if (pv.failed()) ++report.failed;
    report.pieces.push_back(std::move(pv));
  }

  auto count = [&](auto pred) {
    return static_cast<int>(std::count_if(manifest.records.begin(), manifest.records.end(), pred));
  };
  report.complete = report.present == static_cast<int>(manifest.records.size());
  report.tallies = {
      {"sections_8_8", count([](const PieceRecord& r) { return r.section_a_bars == 8 && r.section_b_bars == 8; }),
       sections_8_8, true},
      {"form_ABA", count([](const PieceRecord& r) { return r.repeat_form == RepeatForm::ABA; }), form_aba, false},
      {"meter_2_4", count([](const PieceRecord& r) { return r.meter == Meter(2, 4); }), meter_2_4, true},
      {"major_key", static_cast<int>(manifest.records.size()), major, true},
  };
  return report;
}

}  // namespace skdiff
