#include <gtest/gtest.h>

#include <algorithm>

#include "skdiff/ingest.hpp"
#include "support.hpp"

using namespace skdiff;
using testing_support::fixture;
using testing_support::read_text;

namespace {

std::string score(const std::string& measures, const std::string& attributes =
                                                   "<attributes><divisions>2</divisions>"
                                                   "<key><fifths>0</fifths></key>"
                                                   "<time><beats>2</beats><beat-type>4</beat-type></time></attributes>") {
  return "<?xml version=\"1.0\"?>\n<score-partwise><part-list><score-part id=\"P1\"/></part-list>"
         "<part id=\"P1\"><measure number=\"1\">" +
         attributes + measures + "</measure></part></score-partwise>";
}

const std::string kHarmonyC = "<harmony><root><root-step>C</root-step></root><kind>major</kind></harmony>";

std::string pitched(char step, int octave, int duration, const std::string& extra = "") {
  return "<note>" + extra + "<pitch><step>" + std::string(1, step) + "</step><octave>" + std::to_string(octave) +
         "</octave></pitch><duration>" + std::to_string(duration) + "</duration></note>";
}

}  // namespace

TEST(MusicXml, ReadsPartsMeasuresAndEvents) {
  std::vector<std::string> warnings;
  const auto parts = parse_musicxml(read_text(fixture("two_part.musicxml")), &warnings);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].part_id, "P1");
  EXPECT_EQ(parts[0].name, "Mandolin 1");
  EXPECT_EQ(parts[0].meter, Meter(2, 4));
  EXPECT_EQ(parts[0].key, KeySignature::parse("C", "major"));
  ASSERT_EQ(parts[0].measures.size(), 2u);
  ASSERT_EQ(parts[0].measures[0].events.size(), 2u);
  EXPECT_EQ(parts[0].measures[0].events[0].notes.size(), 2u);  // C4 + E4 chord
  EXPECT_TRUE(parts[0].measures[0].events[1].notes[0].tie_start);
  // Second part: a half note in voice 1 and a three-note chord in voice 2 after <backup>.
  const auto& events = parts[1].measures[0].events;
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[1].onset, Duration());
  EXPECT_EQ(events[1].notes.size(), 3u);
  EXPECT_TRUE(std::any_of(warnings.begin(), warnings.end(),
                          [](const std::string& w) { return w.find("figured-bass") != std::string::npos; }));
}

TEST(MusicXml, ExtractsTheHighestVoiceWithTiesAndRests) {
  const auto parts = parse_musicxml(read_text(fixture("two_part.musicxml")));
  const Melody m = extract_lead(parts, 0);
  ASSERT_EQ(m.notes().size(), 3u);
  EXPECT_EQ(m.notes()[0].pitch, Pitch::parse("E4"));
  EXPECT_EQ(m.notes()[1].pitch, Pitch::parse("G4"));
  EXPECT_EQ(m.notes()[1].onset, Duration(1, 4));
  EXPECT_EQ(m.notes()[1].duration, Duration(1, 2));  // tied eighth plus absorbed rest
  EXPECT_EQ(m.notes()[2].pitch, Pitch::parse("F4"));
  ASSERT_EQ(m.harmony().size(), 2u);
  EXPECT_EQ(m.harmony()[1].chord, ChordSymbol::parse("G7"));
  EXPECT_EQ(m.harmony()[1].onset, Duration(1, 2));
}

TEST(MusicXml, SecondPartBorrowsHarmonyFromTheFirst) {
  const auto parts = parse_musicxml(read_text(fixture("two_part.musicxml")));
  const Melody m = extract_lead(parts, 1);
  EXPECT_EQ(m.notes().front().pitch, Pitch::parse("C4"));
  EXPECT_EQ(m.harmony().size(), 2u);
  EXPECT_THROW(extract_lead(parts, 2), MelodyError);
}

TEST(MusicXml, PickupIsPaddedOrDropped) {
  const auto parts = parse_musicxml(read_text(fixture("pickup.musicxml")));
  EXPECT_TRUE(parts[0].has_pickup());
  const Melody padded = extract_lead(parts, 0);
  EXPECT_EQ(padded.length(), Duration(3, 2));
  EXPECT_EQ(padded.notes().front().onset, Duration());
  EXPECT_EQ(padded.notes().front().pitch, Pitch::parse("D4"));
  EXPECT_EQ(padded.key(), KeySignature::parse("G", "major"));

  ExtractOptions drop;
  drop.anacrusis = AnacrusisMode::drop;
  const Melody dropped = extract_lead(parts, 0, drop);
  EXPECT_EQ(dropped.length(), Duration(1, 1));
  EXPECT_EQ(dropped.notes().front().pitch, Pitch::parse("G4"));
  EXPECT_EQ(dropped.harmony().front().chord, ChordSymbol::parse("G"));
}

TEST(MusicXml, MalformedXmlReportsLine) {
  try {
    parse_musicxml(read_text(fixture("malformed.musicxml")));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(MusicXml, RejectsUnsupportedHarmonyKind) {
  const std::string doc = score("<harmony><root><root-step>C</root-step></root><kind>suspended-fourth</kind></harmony>" +
                                pitched('C', 4, 4));
  try {
    parse_musicxml(doc);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("suspended-fourth"), std::string::npos);
  }
}

TEST(MusicXml, RejectsOverfullMeasure) {
  EXPECT_THROW(parse_musicxml(score(kHarmonyC + pitched('C', 4, 4) + pitched('D', 4, 2))), ParseError);
}

TEST(MusicXml, RejectsOtherRoots) {
  EXPECT_THROW(parse_musicxml("<score-timewise/>"), ParseError);
  EXPECT_THROW(parse_musicxml("<score-partwise><part-list/></score-partwise>"), ParseError);
}

TEST(MusicXml, DefaultsAndDrops) {
  std::vector<std::string> warnings;
  const std::string doc = score(kHarmonyC + "<note><grace/><pitch><step>B</step><octave>4</octave></pitch></note>" +
                                    pitched('C', 4, 4) + pitched('E', 4, 4),
                                "<attributes><divisions>2</divisions></attributes>");
  const auto parts = parse_musicxml(doc, &warnings);
  EXPECT_EQ(parts[0].meter, Meter(4, 4));
  EXPECT_EQ(parts[0].key, KeySignature::parse("C", "major"));
  const Melody m = extract_lead(parts);
  EXPECT_EQ(m.notes().size(), 2u);
  EXPECT_GE(warnings.size(), 3u);
}

TEST(MusicXml, MissingHarmonyIsAGap) {
  const auto parts = parse_musicxml(score(pitched('C', 4, 4)));
  try {
    extract_lead(parts);
    FAIL() << "expected a melody error";
  } catch (const MelodyError& e) {
    EXPECT_NE(std::string(e.what()).find("harmony gap"), std::string::npos);
  }
}

TEST(MusicXml, RestOnlyPartIsEmpty) {
  const auto parts = parse_musicxml(score(kHarmonyC + "<note><rest/><duration>4</duration></note>"));
  try {
    extract_lead(parts);
    FAIL() << "expected a melody error";
  } catch (const MelodyError& e) {
    EXPECT_NE(std::string(e.what()).find("empty melody"), std::string::npos);
  }
}

TEST(MusicXml, AlteredPitchesAndKeys) {
  const std::string doc = score(kHarmonyC + "<note><pitch><step>F</step><alter>1</alter><octave>4</octave></pitch>"
                                            "<duration>4</duration></note>",
                                "<attributes><divisions>2</divisions><key><fifths>-1</fifths><mode>minor</mode></key>"
                                "<time><beats>2</beats><beat-type>4</beat-type></time></attributes>");
  const auto parts = parse_musicxml(doc);
  EXPECT_EQ(parts[0].key, KeySignature::parse("D", "minor"));
  EXPECT_EQ(extract_lead(parts).notes().front().pitch.midi(), 66);
}

TEST(AbsorbRests, ExtendsNeighbours) {
  std::vector<Note> notes = {{Pitch(60), Duration(1, 8), Duration(1, 8), false},
                             {Pitch(62), Duration(1, 2), Duration(1, 8), false}};
  const auto out = absorb_rests(notes, Duration(1, 1));
  EXPECT_EQ(out[0].onset, Duration());
  EXPECT_EQ(out[0].duration, Duration(1, 2));
  EXPECT_EQ(out[1].duration, Duration(1, 2));
}
