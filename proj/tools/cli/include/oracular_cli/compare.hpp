#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace oracular::cli {

struct CompareRow {
  std::string setting;  // directory as given
  std::size_t files = 0;     // analyzed
  std::size_t skipped = 0;   // unreadable or shorter than the requested length
  std::optional<double> mean_total_ir;
  std::optional<double> std_total_ir;  // sample standard deviation, 0 for one file
  std::optional<double> seconds_per_file;
  std::vector<double> totals;  // per analyzed file, in file-name order
};

/// *.mid / *.midi files directly inside `dir`, sorted by name.
std::vector<std::string> midi_files(const std::string& dir);

/// Each file is truncated to bars * 8 steps; shorter files are skipped.
CompareRow compare_dir(const std::string& dir, int bars, std::size_t hop);
std::vector<CompareRow> compare_dirs(const std::vector<std::string>& dirs, int bars, std::size_t hop);

/// "setting,files,skipped,mean_total_ir,std_total_ir,seconds_per_file", one
/// row per directory ("n/a" when nothing was analyzed), then the published
/// reference row for `bars`.
std::string compare_csv(const std::vector<CompareRow>& rows, int bars);

}  // namespace oracular::cli
