#pragma once

#include <string>

#include "oracular/oracle.hpp"

namespace oracular {

// JSON output uses stable field names and round-trip (17 digit) precision,
// so identical inputs give byte-identical text.

std::string to_json(const oracle::IRProfile& profile);
/// {"theta_star", "total", "curve": [[theta, total], ...], "per_frame": [...]}
std::string to_json(const oracle::SweepResult& sweep);
/// {"patterns": [{"length", "occurrences": [...]}, ...]}
std::string to_json(const oracle::MotifSet& motifs);

/// "theta,total_ir" rows for plotting total IR against the threshold.
std::string curve_to_csv(const oracle::SweepResult& sweep);
/// "frame,ir" rows.
std::string to_csv(const oracle::IRProfile& profile);
/// "pattern_index,occurrence_end_frame,length" rows.
std::string to_csv(const oracle::MotifSet& motifs);

}  // namespace oracular
