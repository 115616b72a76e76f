#include "oracular/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oracular::oracle {

namespace {

const char* to_string(OracleErrc code) {
  switch (code) {
    case OracleErrc::kEmptySequence: return "EmptySequence";
    case OracleErrc::kTooShort: return "TooShort";
    case OracleErrc::kParseMismatch: return "ParseMismatch";
  }
  return "Unknown";
}

constexpr double kDedupTolerance = 1e-12;

}  // namespace

OracleError::OracleError(OracleErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

DistanceMatrix::DistanceMatrix(const features::ChromaSequence& seq) : n_(seq.size()), d_(n_ * n_, 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = features::frame_distance(seq.frames[i], seq.frames[j]);
      d_[i * n_ + j] = d;
      d_[j * n_ + i] = d;
    }
  }
}

std::vector<double> DistanceMatrix::candidates() const {
  std::vector<double> all;
  all.reserve(n_ * (n_ - 1) / 2 + 1);
  all.push_back(0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) all.push_back(d_[i * n_ + j]);
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double d : all) {
    if (out.empty() || d - out.back() > kDedupTolerance) out.push_back(d);
  }
  return out;
}

FactorOracle build_oracle(const features::ChromaSequence& frames, double theta) {
  return build_oracle(DistanceMatrix(frames), theta);
}

FactorOracle build_oracle(const DistanceMatrix& dist, double theta) {
  if (dist.size() == 0) throw OracleError(OracleErrc::kEmptySequence, "cannot build an oracle over zero frames");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be non-negative");

  const std::size_t n = dist.size();
  FactorOracle fo;
  fo.theta = theta;
  fo.transitions.resize(n + 1);
  fo.sfx.assign(n + 1, 0);
  fo.lrs.assign(n + 1, 0);
  fo.data.resize(n + 1);
  fo.sfx[0] = kNoState;
  fo.data[0] = kNoState;

  // common[j]: length of the longest common suffix (under theta) of the
  // first i frames and the first j frames, for the state i being added.
  std::vector<std::size_t> common(n + 1, 0), previous(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t frame = i - 1;
    fo.data[i] = frame;
    fo.transitions[i - 1].push_back({frame, i});

    std::size_t k = fo.sfx[i - 1];
    while (k != kNoState) {
      const auto& out = fo.transitions[k];
      const bool reads_frame = std::any_of(out.begin(), out.end(), [&](const Transition& t) {
        return dist(frame, t.label) <= theta;
      });
      if (reads_frame) break;
      fo.transitions[k].push_back({frame, i});
      k = fo.sfx[k];
    }

    std::size_t best = 0, best_state = 0;
    for (std::size_t j = 1; j < i; ++j) {
      common[j] = dist(frame, j - 1) <= theta ? previous[j - 1] + 1 : 0;
      if (common[j] > best) {
        best = common[j];
        best_state = j;
      }
    }
    common[i] = 0;
    fo.sfx[i] = best_state;
    fo.lrs[i] = best;
    std::swap(common, previous);
  }
  return fo;
}

std::optional<std::size_t> next_state(const FactorOracle& oracle, const features::ChromaSequence& frames,
                                      std::size_t state, const features::ChromaFrame& symbol) {
  std::size_t next = kNoState, best_label = kNoState;
  double best = 0.0;
  for (const auto& t : oracle.transitions.at(state)) {
    const double d = features::frame_distance(symbol, frames.frames[t.label]);
    if (d > oracle.theta) continue;
    if (next == kNoState || d < best || (d == best && t.label < best_label)) {
      best = d;
      best_label = t.label;
      next = t.target;
    }
  }
  if (next == kNoState) return std::nullopt;
  return next;
}

std::optional<std::size_t> traverse(const FactorOracle& oracle, const features::ChromaSequence& frames,
                                    std::span<const features::ChromaFrame> query) {
  std::size_t state = 0;
  for (const auto& symbol : query) {
    const auto next = next_state(oracle, frames, state, symbol);
    if (!next) return std::nullopt;
    state = *next;
  }
  return state;
}

CompressionParse compror_encode(const FactorOracle& oracle) {
  CompressionParse parse;
  const std::size_t n = oracle.num_frames();
  std::size_t j = 0;  // frames [0, j) are encoded
  while (j < n) {
    std::size_t i = j;
    while (i < n && oracle.lrs[i + 1] >= i - j + 1) ++i;
    if (i == j) {
      parse.blocks.push_back({j, 1, Block::Kind::kLiteral, 0});
      ++j;
    } else {
      const std::size_t length = i - j;
      const std::size_t source_end = oracle.data[oracle.sfx[i]];
      parse.blocks.push_back({j, length, Block::Kind::kCopy, source_end + 1 - length});
      j = i;
    }
  }
  return parse;
}

void validate_parse(const CompressionParse& parse, std::size_t num_frames) {
  std::size_t next = 0;
  for (const auto& b : parse.blocks) {
    if (b.start != next || b.length == 0) {
      throw OracleError(OracleErrc::kParseMismatch, "blocks do not partition the frame range contiguously");
    }
    if (b.kind == Block::Kind::kCopy && b.pointer >= b.start) {
      throw OracleError(OracleErrc::kParseMismatch, "copy block points at or after its own start");
    }
    next += b.length;
  }
  if (next != num_frames) {
    throw OracleError(OracleErrc::kParseMismatch, "blocks cover " + std::to_string(next) + " frames, oracle has " +
                                                      std::to_string(num_frames));
  }
}

IRProfile information_rate(const FactorOracle& oracle, const CompressionParse& parse) {
  const std::size_t n = oracle.num_frames();
  validate_parse(parse, n);

  IRProfile ir;
  ir.theta = oracle.theta;
  ir.per_frame.assign(n, 0.0);
  std::size_t literals = 0, codewords = 0;
  for (const auto& b : parse.blocks) {
    ++codewords;
    const bool literal = b.kind == Block::Kind::kLiteral;
    for (std::size_t f = b.start; f < b.start + b.length; ++f) {
      if (literal && f > b.start) ++codewords;
      if (literal) ++literals;
      const double c0 = std::log2(static_cast<double>(literals));
      const double c1 = std::log2(static_cast<double>(codewords)) / static_cast<double>(literal ? 1 : b.length);
      ir.c0_total += c0;
      ir.c1_total += c1;
      ir.per_frame[f] = std::max(0.0, c0 - c1);
    }
  }
  for (double v : ir.per_frame) ir.total += v;
  return ir;
}

IRProfile evaluate_threshold(const DistanceMatrix& distances, double theta) {
  const FactorOracle fo = build_oracle(distances, theta);
  return information_rate(fo, compror_encode(fo));
}

SweepResult sweep_threshold(const features::ChromaSequence& frames) {
  if (frames.size() < 2) throw OracleError(OracleErrc::kTooShort, "threshold sweep needs at least two frames");
  const DistanceMatrix distances(frames);
  SweepResult result;
  bool first = true;
  for (double theta : distances.candidates()) {
    const FactorOracle fo = build_oracle(distances, theta);
    CompressionParse parse = compror_encode(fo);
    IRProfile ir = information_rate(fo, parse);
    result.curve.emplace_back(theta, ir.total);
    if (first || ir.total > result.best.total) {
      result.theta_star = theta;
      result.best = std::move(ir);
      result.best_parse = std::move(parse);
      first = false;
    }
  }
  return result;
}

double total_ir(const features::ChromaSequence& frames) { return sweep_threshold(frames).best.total; }

MotifSet find_motifs(const FactorOracle& oracle, std::size_t min_len) {
  if (min_len == 0) throw std::invalid_argument("min_len must be at least 1");
  const std::size_t states = oracle.num_states();
  std::vector<std::size_t> parent(states);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<std::size_t> shortest(states, kNoState);
  std::vector<bool> linked(states, false);
  for (std::size_t i = 1; i < states; ++i) {
    if (oracle.lrs[i] < min_len || oracle.sfx[i] == 0) continue;
    const std::size_t a = find(i), b = find(oracle.sfx[i]);
    const std::size_t len = std::min({oracle.lrs[i], shortest[a], shortest[b]});
    parent[a] = b;
    shortest[b] = len;
    linked[i] = linked[oracle.sfx[i]] = true;
  }

  std::map<std::size_t, Pattern> by_root;
  for (std::size_t i = 1; i < states; ++i) {
    if (!linked[i]) continue;
    const std::size_t root = find(i);
    Pattern& p = by_root[root];
    p.length = shortest[root];
    p.occurrences.push_back(oracle.data[i]);
  }

  MotifSet motifs;
  for (auto& [root, pattern] : by_root) motifs.patterns.push_back(std::move(pattern));
  std::sort(motifs.patterns.begin(), motifs.patterns.end(),
            [](const Pattern& a, const Pattern& b) { return a.occurrences.front() < b.occurrences.front(); });
  return motifs;
}

}  // namespace oracular::oracle
