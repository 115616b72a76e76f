#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracular/midi.hpp"

namespace oracular::features {

inline constexpr std::size_t kNumPitchClasses = 12;

/// Pitch-class profile C..B: either all zero (silence) or unit L2 norm.
using ChromaFrame = std::array<double, kNumPitchClasses>;

struct ChromaSequence {
  std::vector<ChromaFrame> frames;
  std::size_t hop = 1;

  std::size_t size() const { return frames.size(); }
};

class TooShortError : public std::invalid_argument {
 public:
  explicit TooShortError(const std::string& what) : std::invalid_argument("TooShort: " + what) {}
};

/// One frame per window of `hop` steps (the last window may be partial).
/// Each frame counts active cells per pitch class, then L2-normalizes.
ChromaSequence chroma_from_piano_roll(const midi::PianoRoll& roll, std::size_t hop = 1);

/// Euclidean distance.
double frame_distance(const ChromaFrame& a, const ChromaFrame& b);

/// Every distinct pairwise frame distance, ascending, with 0 always first.
/// Values closer than 1e-12 collapse to the smaller one.
std::vector<double> candidate_thresholds(const ChromaSequence& seq);

/// One row per frame, 12 columns, 9 significant digits, with a header row.
std::string to_csv(const ChromaSequence& seq);

}  // namespace oracular::features
