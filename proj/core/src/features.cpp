#include "oracular/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace oracular::features {

namespace {
constexpr double kDedupTolerance = 1e-12;
constexpr const char* kClassNames[kNumPitchClasses] = {"C",  "C#", "D",  "D#", "E",  "F",
                                                       "F#", "G",  "G#", "A",  "A#", "B"};
}  // namespace

ChromaSequence chroma_from_piano_roll(const midi::PianoRoll& roll, std::size_t hop) {
  if (hop == 0) throw std::invalid_argument("hop must be at least 1");
  ChromaSequence seq;
  seq.hop = hop;
  const std::size_t count = (roll.num_steps() + hop - 1) / hop;
  seq.frames.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    ChromaFrame frame{};
    const std::size_t end = std::min(roll.num_steps(), (w + 1) * hop);
    for (std::size_t step = w * hop; step < end; ++step) {
      for (std::size_t p = 0; p < midi::kNumPitches; ++p) {
        if (roll.active(step, p)) frame[p % kNumPitchClasses] += 1.0;
      }
    }
    double norm = 0.0;
    for (double v : frame) norm += v * v;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& v : frame) v /= norm;
    }
    seq.frames.push_back(frame);
  }
  return seq;
}

double frame_distance(const ChromaFrame& a, const ChromaFrame& b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumPitchClasses; ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<double> candidate_thresholds(const ChromaSequence& seq) {
  if (seq.size() < 2) throw TooShortError("need at least two frames to form candidate thresholds");
  std::vector<double> all;
  all.reserve(seq.size() * (seq.size() - 1) / 2 + 1);
  all.push_back(0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) all.push_back(frame_distance(seq.frames[i], seq.frames[j]));
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double d : all) {
    if (out.empty() || d - out.back() > kDedupTolerance) out.push_back(d);
  }
  return out;
}

std::string to_csv(const ChromaSequence& seq) {
  std::string out;
  for (std::size_t c = 0; c < kNumPitchClasses; ++c) {
    out += kClassNames[c];
    out += c + 1 < kNumPitchClasses ? ',' : '\n';
  }
  char buf[32];
  for (const auto& frame : seq.frames) {
    for (std::size_t c = 0; c < kNumPitchClasses; ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", frame[c]);
      out += buf;
      out += c + 1 < kNumPitchClasses ? ',' : '\n';
    }
  }
  return out;
}

}  // namespace oracular::features
