#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oracular/midi.hpp"
#include "oracular/oracle.hpp"

namespace oracular::cli {

/// One published row of averaged total IR at 8, 16 and 32 bars. Display only.
struct ReferenceRow {
  const char* name;
  std::array<std::optional<double>, 3> total_ir;
};

inline constexpr const char* kReferenceLabel = "paper-reported, not comparable in absolute terms";
inline constexpr std::array<int, 3> kReferenceBars = {8, 16, 32};

const std::vector<ReferenceRow>& reference_table();
/// Published per-setting analysis time in seconds at 8, 16 and 32 bars.
const std::array<double, 3>& reference_seconds();
/// Reference value for the generating model at `bars` (8, 16 or 32).
std::optional<double> reference_proposed(int bars);

struct AnalysisReport {
  std::string source;
  std::size_t num_steps = 0;
  std::size_t hop = 1;
  std::size_t num_frames = 0;
  double theta_star = 0.0;
  double total_ir = 0.0;
  std::vector<std::pair<double, double>> ir_curve;
  std::size_t min_motif_len = 4;
  oracle::MotifSet motifs;
};

/// chroma -> threshold sweep -> motifs at the best threshold.
AnalysisReport analyze_roll(const midi::PianoRoll& roll, const std::string& source, std::size_t hop,
                            std::size_t min_motif_len);

/// Reads, parses and quantizes an SMF, then analyze_roll.
midi::PianoRoll load_roll(const std::string& path);
AnalysisReport analyze_file(const std::string& path, std::size_t hop, std::size_t min_motif_len);

/// Stable field order, round-trip precision, reference table embedded.
std::string report_to_json(const AnalysisReport& report);

}  // namespace oracular::cli
