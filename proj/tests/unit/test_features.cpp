#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracular/features.hpp"

using namespace oracular;
using features::ChromaFrame;

namespace {

midi::PianoRoll chord(std::initializer_list<std::size_t> pitches) {
  midi::PianoRoll roll(1);
  for (auto p : pitches) roll.set(0, p);
  return roll;
}

}  // namespace

TEST(Chroma, SinglePitch) {
  const auto seq = features::chroma_from_piano_roll(chord({60}), 1);
  ASSERT_EQ(seq.size(), 1u);
  for (std::size_t c = 0; c < 12; ++c) EXPECT_EQ(seq.frames[0][c], c == 0 ? 1.0 : 0.0);
}

TEST(Chroma, MajorTriadEqualMass) {
  const auto f = features::chroma_from_piano_roll(chord({60, 64, 67}), 1).frames[0];
  const double third = 1.0 / std::sqrt(3.0);
  for (std::size_t c = 0; c < 12; ++c) {
    EXPECT_NEAR(f[c], (c == 0 || c == 4 || c == 7) ? third : 0.0, 1e-15);
  }
}

TEST(Chroma, SilenceIsZeroAndHopWindows) {
  midi::PianoRoll roll(5);
  roll.set(0, 62);
  roll.set(1, 74);
  roll.set(4, 61);
  const auto seq = features::chroma_from_piano_roll(roll, 2);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq.hop, 2u);
  EXPECT_DOUBLE_EQ(seq.frames[0][2], 1.0);
  for (double v : seq.frames[1]) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(seq.frames[2][1], 1.0);
  EXPECT_THROW(features::chroma_from_piano_roll(roll, 0), std::invalid_argument);
}

TEST(Chroma, FramesAreUnitOrZero) {
  std::mt19937_64 rng(5);
  const auto seq = features::chroma_from_piano_roll(fixtures::random_roll(200, 0.02, rng), 1);
  for (const auto& f : seq.frames) {
    double n2 = 0.0;
    for (double v : f) {
      EXPECT_GE(v, 0.0);
      n2 += v * v;
    }
    if (n2 != 0.0) EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-9);
  }
}

TEST(Chroma, TranspositionCovariance) {
  std::mt19937_64 rng(8);
  const auto roll = fixtures::random_roll(64, 0.05, rng);
  midi::PianoRoll octave(64), semitone(64);
  for (std::size_t s = 0; s < 64; ++s) {
    for (std::size_t p = 0; p + 12 < 128; ++p) {
      if (roll.active(s, p)) octave.set(s, p + 12);
    }
    for (std::size_t p = 0; p + 1 < 128; ++p) {
      if (roll.active(s, p)) semitone.set(s, p + 1);
    }
  }
  // Only pitches that stay in range shift cleanly; compare against the
  // in-range part of the source.
  midi::PianoRoll src_octave(64), src_semitone(64);
  for (std::size_t s = 0; s < 64; ++s) {
    for (std::size_t p = 0; p + 12 < 128; ++p) src_octave.set(s, p, roll.active(s, p));
    for (std::size_t p = 0; p + 1 < 128; ++p) src_semitone.set(s, p, roll.active(s, p));
  }
  const auto a = features::chroma_from_piano_roll(src_octave, 1);
  const auto b = features::chroma_from_piano_roll(octave, 1);
  const auto c = features::chroma_from_piano_roll(src_semitone, 1);
  const auto d = features::chroma_from_piano_roll(semitone, 1);
  for (std::size_t f = 0; f < 64; ++f) {
    for (std::size_t k = 0; k < 12; ++k) {
      EXPECT_DOUBLE_EQ(a.frames[f][k], b.frames[f][k]);
      EXPECT_DOUBLE_EQ(c.frames[f][k], d.frames[f][(k + 1) % 12]);
    }
  }
}

TEST(FrameDistance, Examples) {
  ChromaFrame zero{}, c{}, e{};
  c[0] = 1.0;
  e[4] = 1.0;
  EXPECT_EQ(features::frame_distance(c, c), 0.0);
  EXPECT_DOUBLE_EQ(features::frame_distance(c, e), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(features::frame_distance(zero, c), 1.0);
}

TEST(FrameDistance, MetricAxioms) {
  std::mt19937_64 rng(17);
  const auto seq = fixtures::random_chroma(40, rng);
  for (const auto& a : seq.frames) {
    EXPECT_EQ(features::frame_distance(a, a), 0.0);
    for (const auto& b : seq.frames) {
      const double ab = features::frame_distance(a, b);
      EXPECT_EQ(ab, features::frame_distance(b, a));
      if (&a != &b) EXPECT_GT(ab, 0.0);
      for (const auto& c : seq.frames) {
        EXPECT_LE(features::frame_distance(a, c), ab + features::frame_distance(b, c) + 1e-12);
      }
    }
  }
}

TEST(CandidateThresholds, Examples) {
  features::ChromaSequence two = fixtures::symbols_to_chroma("aa");
  EXPECT_EQ(features::candidate_thresholds(two), std::vector<double>{0.0});
  const auto ortho = features::candidate_thresholds(fixtures::symbols_to_chroma("ab"));
  ASSERT_EQ(ortho.size(), 2u);
  EXPECT_EQ(ortho[0], 0.0);
  EXPECT_DOUBLE_EQ(ortho[1], std::sqrt(2.0));
  EXPECT_THROW(features::candidate_thresholds(fixtures::symbols_to_chroma("a")), features::TooShortError);
}

TEST(CandidateThresholds, MatchesPairEnumeration) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto seq = fixtures::random_chroma(4, rng);
    if (trial % 3 == 0) seq.frames[2] = seq.frames[0];
    std::vector<double> expected{0.0};
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        const double d = features::frame_distance(seq.frames[i], seq.frames[j]);
        bool seen = false;
        for (double e : expected) seen = seen || std::abs(e - d) <= 1e-12;
        if (!seen) expected.push_back(d);
      }
    }
    std::sort(expected.begin(), expected.end());
    const auto got = features::candidate_thresholds(seq);
    EXPECT_LE(got.size(), 7u);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_DOUBLE_EQ(got[k], expected[k]);
    for (std::size_t k = 1; k < got.size(); ++k) EXPECT_LT(got[k - 1], got[k]);
  }
}

TEST(ChromaCsv, HeaderAndPrecision) {
  const auto csv = features::to_csv(features::chroma_from_piano_roll(chord({60, 64, 67}), 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "C,C#,D,D#,E,F,F#,G,G#,A,A#,B");
  EXPECT_NE(csv.find("0.577350269"), std::string::npos);
}
