#include <gtest/gtest.h>

#include <random>

#include "skdiff/pitch_time.hpp"

using namespace skdiff;

TEST(Duration, ExactArithmetic) {
  EXPECT_EQ(Duration(1, 8) + Duration(1, 8), Duration(1, 4));
  EXPECT_EQ(Duration(3, 8) - Duration(1, 4), Duration(1, 8));
  EXPECT_EQ(Duration(1, 4) * 3, Duration(3, 4));
  EXPECT_EQ(Duration(3, 4) / 3, Duration(1, 4));
  EXPECT_EQ(Duration(2, 4).to_string(), "1/2");
  EXPECT_EQ(Duration().to_string(), "0/1");
  EXPECT_LT(Duration(1, 3), Duration(1, 2));
}

TEST(Duration, ParseRoundTrip) {
  for (const char* s : {"0/1", "1/2", "3/8", "7/16", "5/1"}) EXPECT_EQ(Duration::parse(s).to_string(), s);
  EXPECT_EQ(Duration::parse("2/4"), Duration(1, 2));
  EXPECT_THROW(Duration::parse("1/0"), ParseError);
  EXPECT_THROW(Duration::parse("x"), ParseError);
}

TEST(Duration, MultiplesAndGcd) {
  EXPECT_TRUE(Duration(3, 8).is_multiple_of(Duration(1, 8)));
  EXPECT_FALSE(Duration(3, 8).is_multiple_of(Duration(1, 4)));
  EXPECT_EQ(Duration(3, 4).count_of(Duration(1, 8)), 6);
  EXPECT_THROW(Duration(3, 8).count_of(Duration(1, 4)), InfeasibleError);
  EXPECT_EQ(gcd(Duration(3, 8), Duration(1, 4)), Duration(1, 8));
  EXPECT_EQ(gcd(Duration(1, 3), Duration(1, 2)), Duration(1, 6));
  EXPECT_EQ(gcd(Duration(), Duration(1, 2)), Duration(1, 2));
  EXPECT_EQ(Duration(7, 8).floor_to(Duration(1, 4)), Duration(3, 4));
}

TEST(Pitch, IntervalExamples) {
  EXPECT_EQ(pitch_interval(Pitch(60), Pitch(64)), 4);
  EXPECT_EQ(pitch_interval(Pitch(67), Pitch(67)), 0);
  EXPECT_EQ(pitch_interval(Pitch(76), Pitch(72)), -4);
}

TEST(Pitch, IntervalIsAntisymmetric) {
  for (int a = 0; a < 128; a += 7) {
    for (int b = 0; b < 128; b += 5) EXPECT_EQ(pitch_interval(Pitch(a), Pitch(b)), -pitch_interval(Pitch(b), Pitch(a)));
  }
}

TEST(Pitch, ParseAndName) {
  EXPECT_EQ(Pitch::parse("C4").midi(), 60);
  EXPECT_EQ(Pitch::parse("F#5").midi(), 78);
  EXPECT_EQ(Pitch::parse("Bb3").midi(), 58);
  EXPECT_EQ(Pitch::parse("Bb3").name(), "Bb3");
  EXPECT_EQ(Pitch(61).name(), "C#4");
  EXPECT_EQ(Pitch::parse("Cb4").midi(), 59);
  EXPECT_THROW(Pitch::parse("H4"), ParseError);
  EXPECT_THROW(Pitch::parse("C"), ParseError);
  EXPECT_THROW(Pitch(128), MelodyError);
  EXPECT_EQ(Pitch::parse("A#4"), Pitch::parse("Bb4"));
}

TEST(Chord, TonesExamples) {
  EXPECT_EQ(chord_tones(ChordSymbol::parse("C")), (PitchClassSet{0, 4, 7}));
  EXPECT_EQ(chord_tones(ChordSymbol::parse("G7")), (PitchClassSet{7, 11, 2, 5}));
  EXPECT_EQ(chord_tones(ChordSymbol::parse("Am")), (PitchClassSet{9, 0, 4}));
}

TEST(Chord, EveryQualityHasThreeOrFourTones) {
  for (int root = 0; root < 12; ++root) {
    for (int q = 0; q < 7; ++q) {
      const ChordSymbol c{root, static_cast<ChordQuality>(q)};
      const auto size = chord_tones(c).size();
      EXPECT_TRUE(size == 3 || size == 4) << c.name();
      EXPECT_EQ(chord_tones(c), chord_tones(c));
      EXPECT_EQ(ChordSymbol::parse(c.name()), c);
    }
  }
}

TEST(Chord, ParseVocabulary) {
  EXPECT_EQ(ChordSymbol::parse("F#m").root, 6);
  EXPECT_EQ(ChordSymbol::parse("F#m").quality, ChordQuality::minor);
  EXPECT_EQ(ChordSymbol::parse("Bb7").quality, ChordQuality::dominant7);
  EXPECT_EQ(ChordSymbol::parse("Dmaj7").quality, ChordQuality::major7);
  EXPECT_EQ(ChordSymbol::parse("Em7").quality, ChordQuality::minor7);
  EXPECT_EQ(ChordSymbol::parse("Bdim").quality, ChordQuality::diminished);
  EXPECT_EQ(ChordSymbol::parse("Caug").quality, ChordQuality::augmented);
  EXPECT_THROW(ChordSymbol::parse("Csus4"), ParseError);
  EXPECT_THROW(ChordSymbol::parse("C9"), ParseError);
}

TEST(Chord, MemberRank) {
  const ChordSymbol g7 = ChordSymbol::parse("G7");
  EXPECT_EQ(chord_member_rank(g7, 7), 3);
  EXPECT_EQ(chord_member_rank(g7, 2), 2);
  EXPECT_EQ(chord_member_rank(g7, 11), 1);
  EXPECT_EQ(chord_member_rank(g7, 5), 0);
  EXPECT_EQ(chord_member_rank(g7, 0), -1);
}

TEST(Key, ScaleTonesAndNames) {
  EXPECT_EQ(KeySignature::parse("C", "major").scale_tones(), (PitchClassSet{0, 2, 4, 5, 7, 9, 11}));
  EXPECT_EQ(KeySignature::parse("A", "minor").scale_tones(), (PitchClassSet{9, 11, 0, 2, 4, 5, 7}));
  EXPECT_EQ(KeySignature::from_fifths(-3, Mode::major).name(), "Eb major");
  EXPECT_EQ(KeySignature::from_fifths(3, Mode::minor).name(), "F# minor");
  EXPECT_EQ(KeySignature::from_fifths(2, Mode::major), KeySignature::parse("D", "major"));
  EXPECT_THROW(KeySignature::parse("C", "dorian"), ParseError);
}

TEST(Meter, Validation) {
  EXPECT_EQ(Meter::parse("3/8").bar_length(), Duration(3, 8));
  EXPECT_THROW(Meter(3, 6), MelodyError);
  EXPECT_THROW(Meter(0, 4), MelodyError);
  EXPECT_THROW(Meter::parse("3/6"), ParseError);
  EXPECT_THROW(Meter::parse("three"), ParseError);
}

TEST(MetricStrength, TwoFourExamples) {
  const Meter m(2, 4);
  EXPECT_EQ(metric_strength(Duration(0, 1), m), 3);
  EXPECT_EQ(metric_strength(Duration(1, 4), m), 2);
  EXPECT_EQ(metric_strength(Duration(1, 8), m), 1);
  EXPECT_EQ(metric_strength(Duration(1, 16), m), 0);
  EXPECT_EQ(metric_strength(Duration(1, 2), m), 3);
}

TEST(MetricStrength, BarStartIsTheUniqueMaximum) {
  for (const Meter& m : {Meter(2, 4), Meter(3, 8), Meter(3, 4), Meter(6, 8), Meter(4, 4), Meter(2, 2)}) {
    const Duration step(1, 64);
    const int top = metric_strength(Duration(), m);
    for (Duration t = step; t < m.bar_length(); t += step) EXPECT_LT(metric_strength(t, m), top) << m.to_string();
  }
}

namespace {

std::vector<HarmonySpan> tonic_over(Duration length) { return {{Duration(), length, ChordSymbol::parse("C")}}; }

Note note(int midi, Duration onset, Duration dur, bool tie = false) { return {Pitch(midi), onset, dur, tie}; }

}  // namespace

TEST(Melody, RejectsOverlappingNotes) {
  const std::vector<Note> notes = {note(60, Duration(0, 1), Duration(1, 2)), note(62, Duration(1, 4), Duration(1, 4))};
  EXPECT_THROW(Melody(notes, {}, Meter(2, 4), tonic_over(Duration(1, 2))), MelodyError);
}

TEST(Melody, RejectsUnorderedAndEmpty) {
  const std::vector<Note> unordered = {note(60, Duration(1, 4), Duration(1, 4)), note(62, Duration(0, 1), Duration(1, 4))};
  EXPECT_THROW(Melody(unordered, {}, Meter(2, 4), tonic_over(Duration(1, 2))), MelodyError);
  EXPECT_THROW(Melody({}, {}, Meter(2, 4), {}), MelodyError);
}

TEST(Melody, RejectsHarmonyGaps) {
  const std::vector<Note> notes = {note(60, Duration(0, 1), Duration(1, 2)), note(62, Duration(1, 2), Duration(1, 2))};
  EXPECT_THROW(Melody(notes, {}, Meter(2, 4), tonic_over(Duration(1, 2))), MelodyError);
  const std::vector<HarmonySpan> late = {{Duration(1, 4), Duration(3, 4), ChordSymbol::parse("C")}};
  EXPECT_THROW(Melody(notes, {}, Meter(2, 4), late), MelodyError);
}

TEST(Melody, RejectsDanglingTie) {
  const std::vector<Note> notes = {note(60, Duration(0, 1), Duration(1, 4)), note(62, Duration(1, 4), Duration(1, 4), true)};
  EXPECT_THROW(Melody(notes, {}, Meter(2, 4), tonic_over(Duration(1, 2))), MelodyError);
}

TEST(Melody, MergesEqualAdjacentChords) {
  const std::vector<Note> notes = {note(60, Duration(0, 1), Duration(1, 1))};
  const std::vector<HarmonySpan> h = {{Duration(0, 1), Duration(1, 2), ChordSymbol::parse("C")},
                                      {Duration(1, 2), Duration(1, 2), ChordSymbol::parse("C")}};
  const Melody m(notes, {}, Meter(2, 4), h);
  ASSERT_EQ(m.harmony().size(), 1u);
  EXPECT_EQ(m.harmony().front().duration, Duration(1, 1));
  EXPECT_EQ(chord_at(m.harmony(), Duration(3, 4)), ChordSymbol::parse("C"));
}

TEST(Melody, TransposesNotesChordsAndKey) {
  const std::vector<Note> notes = {note(60, Duration(0, 1), Duration(1, 2))};
  const Melody m(notes, {}, Meter(2, 4), tonic_over(Duration(1, 2)));
  const Melody up = m.transposed(5);
  EXPECT_EQ(up.notes().front().pitch.midi(), 65);
  EXPECT_EQ(up.harmony().front().chord, ChordSymbol::parse("F"));
  EXPECT_EQ(up.key(), KeySignature::parse("F", "major"));
}
