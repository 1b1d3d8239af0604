#include <gtest/gtest.h>

#include "skdiff/leadsheet.hpp"
#include "support.hpp"

using namespace skdiff;

TEST(LeadSheet, ParsesNotesChordsKeyAndMeter) {
  const Melody m = parse_leadsheet_text(
      "key G major\n"
      "meter 2/4\n"
      "chords | G | D7 |\n"
      "notes G4:q B4:e A4:e F#4:h\n");
  EXPECT_EQ(m.key(), KeySignature::parse("G", "major"));
  EXPECT_EQ(m.meter(), Meter(2, 4));
  ASSERT_EQ(m.notes().size(), 4u);
  EXPECT_EQ(m.notes()[2].onset, Duration(3, 8));
  EXPECT_EQ(m.notes()[3].pitch.midi(), 66);
  ASSERT_EQ(m.harmony().size(), 2u);
  EXPECT_EQ(m.harmony()[1].onset, Duration(1, 2));
  EXPECT_EQ(m.harmony()[1].chord, ChordSymbol::parse("D7"));
}

TEST(LeadSheet, SplitCellsAndContinuation) {
  const Melody m = parse_leadsheet_text(
      "key C major\nmeter 2/4\nchords | C G | . | F |\nnotes C4:h D4:h E4:h\n");
  ASSERT_EQ(m.harmony().size(), 3u);
  EXPECT_EQ(m.harmony()[1].chord, ChordSymbol::parse("G"));
  EXPECT_EQ(m.harmony()[1].onset, Duration(1, 4));
  EXPECT_EQ(m.harmony()[1].duration, Duration(3, 4));
}

TEST(LeadSheet, TiesMergeAndRestsAreAbsorbed) {
  const Melody m = testing_support::fixture_melody("ties_rests.lsht");
  ASSERT_GE(m.notes().size(), 3u);
  EXPECT_EQ(m.notes()[1].pitch, Pitch::parse("A4"));
  EXPECT_EQ(m.notes()[1].duration, Duration(1, 2));  // A4:q~ A4:e plus the absorbed rest
  EXPECT_EQ(m.notes()[2].onset, Duration(3, 4));
  EXPECT_EQ(m.length(), Duration(2, 1));
}

TEST(LeadSheet, ReportsLineAndColumn) {
  try {
    parse_leadsheet_text("key C major\nmeter 2/4\nchords | C |\nnotes C4:q Q4:q\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 12u);
  }
  try {
    parse_leadsheet_text("key C major\nmeter 2/4\nchords | C | Csus |\nnotes C4:h C4:h\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("sus"), std::string::npos);
  }
}

TEST(LeadSheet, Errors) {
  EXPECT_THROW(parse_leadsheet_text("meter 2/4\nchords | C |\nnotes C4:h\n"), ParseError);
  EXPECT_THROW(parse_leadsheet_text("key C major\nmeter 2/4\nchords | C |\nnotes C4:x\n"), ParseError);
  EXPECT_THROW(parse_leadsheet_text("key C major\nmeter 2/4\nchords | C |\nnotes C4:q~ D4:q\n"), ParseError);
  EXPECT_THROW(parse_leadsheet_text("key C major\nmeter 2/4\nfoo bar\n"), ParseError);
  EXPECT_THROW(parse_leadsheet_text("key C major\nmeter 2/4\nchords | C |\nnotes\n"), MelodyError);
  // One bar of chords under two bars of notes.
  EXPECT_THROW(parse_leadsheet_text("key C major\nmeter 2/4\nchords | C |\nnotes C4:h D4:h\n"), MelodyError);
}

TEST(LeadSheet, RoundTripsEveryFixture) {
  for (const std::string& name : testing_support::lead_sheet_fixtures()) {
    const Melody m = testing_support::fixture_melody(name);
    const std::string text = format_leadsheet_text(m);
    EXPECT_EQ(parse_leadsheet_text(text), m) << name << "\n" << text;
    EXPECT_EQ(format_leadsheet_text(parse_leadsheet_text(text)), text) << name;
  }
}

TEST(LeadSheet, FormatsLongNotesAsTiedTokens) {
  const Melody m = parse_leadsheet_text("key C major\nmeter 2/4\nchords | C | C |\nnotes C4:q D4:h.\n");
  const std::string text = format_leadsheet_text(m);
  EXPECT_NE(text.find("D4:h.") , std::string::npos);
  const Melody odd = parse_leadsheet_text("key C major\nmeter 2/4\nchords | C | C |\nnotes C4:s D4:h~ D4:e~ D4:s. r:e r:s.\n");
  EXPECT_EQ(parse_leadsheet_text(format_leadsheet_text(odd)), odd);
}
