#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oracular/features.hpp"

namespace oracular::oracle {

inline constexpr std::size_t kNoState = std::numeric_limits<std::size_t>::max();

enum class OracleErrc { kEmptySequence, kTooShort, kParseMismatch };

class OracleError : public std::runtime_error {
 public:
  OracleError(OracleErrc code, const std::string& what);
  OracleErrc code() const noexcept { return code_; }

 private:
  OracleErrc code_;
};

/// Symmetric table of frame_distance over a sequence.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const features::ChromaSequence& seq);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  /// Sorted distinct off-diagonal distances with 0 prepended (same rule as
  /// features::candidate_thresholds).
  std::vector<double> candidates() const;

 private:
  std::size_t n_;
  std::vector<double> d_;
};

struct Transition {
  std::size_t label;   // index of the frame the transition reads
  std::size_t target;  // destination state

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Factor oracle over N frames: states 0..N, state i >= 1 standing for
/// frame i-1. With theta > 0 it is a variable Markov oracle: two frames are
/// "the same symbol" when their distance is at most theta.
struct FactorOracle {
  double theta = 0.0;
  std::vector<std::vector<Transition>> transitions;
  /// sfx[i]: state ending the earliest occurrence of the longest repeated
  /// suffix of the first i frames (0 when nothing repeats); sfx[0] = kNoState.
  std::vector<std::size_t> sfx;
  /// lrs[i]: length of that repeated suffix.
  std::vector<std::size_t> lrs;
  /// data[i] = i - 1, the frame carried by state i; data[0] = kNoState.
  std::vector<std::size_t> data;

  std::size_t num_states() const { return sfx.size(); }
  std::size_t num_frames() const { return sfx.empty() ? 0 : sfx.size() - 1; }

  friend bool operator==(const FactorOracle&, const FactorOracle&) = default;
};

/// Online left-to-right construction. Forward transitions follow the
/// incremental factor-oracle rule (walk the suffix chain of the previous
/// state adding transitions until one already reads a frame within theta).
/// Suffix links and lrs come from a rolling common-suffix table, which makes
/// them exact: at theta = 0 they equal the brute-force longest repeated
/// suffix and its first occurrence.
FactorOracle build_oracle(const features::ChromaSequence& frames, double theta);
FactorOracle build_oracle(const DistanceMatrix& distances, double theta);

/// One forward step from `state` reading `symbol`: the transition whose
/// label frame is nearest within theta (ties to the smallest label).
std::optional<std::size_t> next_state(const FactorOracle& oracle, const features::ChromaSequence& frames,
                                      std::size_t state, const features::ChromaFrame& symbol);

/// Follows forward transitions from state 0 reading `query`; frames match
/// when within the oracle's theta (nearest label wins, ties to the smallest).
/// Returns the final state, or nullopt when some step has no transition.
std::optional<std::size_t> traverse(const FactorOracle& oracle, const features::ChromaSequence& frames,
                                    std::span<const features::ChromaFrame> query);

struct Block {
  enum class Kind { kLiteral, kCopy };

  std::size_t start = 0;
  std::size_t length = 1;
  Kind kind = Kind::kLiteral;
  std::size_t pointer = 0;  // source start frame, copies only

  friend bool operator==(const Block&, const Block&) = default;
};

struct CompressionParse {
  std::vector<Block> blocks;

  friend bool operator==(const CompressionParse&, const CompressionParse&) = default;
};

/// Greedy Compror parse: a copy block grows while the lrs of the next state
/// still covers the whole block; a frame with nothing to copy is a literal.
CompressionParse compror_encode(const FactorOracle& oracle);

/// Throws OracleError(kParseMismatch) unless `parse` contiguously covers
/// [0, num_frames) with valid blocks.
void validate_parse(const CompressionParse& parse, std::size_t num_frames);

struct IRProfile {
  std::vector<double> per_frame;
  double total = 0.0;
  double theta = 0.0;
  double c0_total = 0.0;  // bits
  double c1_total = 0.0;  // bits

  friend bool operator==(const IRProfile&, const IRProfile&) = default;
};

/// Per frame n:
///   C0(n) = log2(number of literal codewords so far), the cost of naming
///           the frame within the alphabet observed up to n;
///   C1(n) = log2(number of codewords so far) / L, L the length of the block
///           holding n (1 for literals);
///   IR(n) = max(0, C0(n) - C1(n)).
IRProfile information_rate(const FactorOracle& oracle, const CompressionParse& parse);

struct SweepResult {
  double theta_star = 0.0;
  IRProfile best;
  CompressionParse best_parse;
  std::vector<std::pair<double, double>> curve;  // (theta, total IR), ascending theta
};

/// Evaluates total IR at every candidate threshold; the argmax wins, ties
/// going to the smallest theta.
SweepResult sweep_threshold(const features::ChromaSequence& frames);

/// Total IR at one threshold (build, encode, measure).
IRProfile evaluate_threshold(const DistanceMatrix& distances, double theta);

double total_ir(const features::ChromaSequence& frames);

struct Pattern {
  std::size_t length = 0;
  std::vector<std::size_t> occurrences;  // end-frame indices, ascending

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct MotifSet {
  std::vector<Pattern> patterns;

  friend bool operator==(const MotifSet&, const MotifSet&) = default;
};

/// Every state i with lrs[i] >= min_len links i and sfx[i] as two ends of a
/// repeated segment. Linked states are merged into one pattern whose length
/// is the shortest lrs among its links. Patterns are ordered by first
/// occurrence.
MotifSet find_motifs(const FactorOracle& oracle, std::size_t min_len);

}  // namespace oracular::oracle
