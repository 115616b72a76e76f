#include "oracular_cli/compare.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <spdlog/spdlog.h>

#include "oracular/midi.hpp"
#include "oracular_cli/analysis.hpp"

namespace oracular::cli {

namespace fs = std::filesystem;

std::vector<std::string> midi_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".mid" || ext == ".midi") out.push_back(entry.path().string());
  }
  if (ec) spdlog::warn("cannot list {}: {}", dir, ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

CompareRow compare_dir(const std::string& dir, int bars, std::size_t hop) {
  CompareRow row;
  row.setting = dir;
  const std::size_t steps = static_cast<std::size_t>(bars) * midi::kStepsPerBar;
  double seconds = 0.0;
  for (const auto& path : midi_files(dir)) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const midi::PianoRoll roll = load_roll(path);
      if (roll.num_steps() < steps) {
        spdlog::info("{}: {} steps, shorter than {} bars; skipped", path, roll.num_steps(), bars);
        ++row.skipped;
        continue;
      }
      row.totals.push_back(analyze_roll(roll.resized(steps), path, hop, 1).total_ir);
    } catch (const std::exception& e) {
      spdlog::warn("{}: {}; skipped", path, e.what());
      ++row.skipped;
      continue;
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  const std::size_t n = row.totals.size();
  row.files = n;
  if (n == 0) return row;
  double sum = 0.0;
  for (double v : row.totals) sum += v;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : row.totals) sq += (v - mean) * (v - mean);
  row.mean_total_ir = mean;
  row.std_total_ir = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
  row.seconds_per_file = seconds / static_cast<double>(n);
  return row;
}

std::vector<CompareRow> compare_dirs(const std::vector<std::string>& dirs, int bars, std::size_t hop) {
  if (bars != 8 && bars != 16 && bars != 32) throw std::invalid_argument("bars must be 8, 16 or 32");
  std::vector<CompareRow> rows;
  for (const auto& d : dirs) rows.push_back(compare_dir(d, bars, hop));
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

}  // namespace

std::string compare_csv(const std::vector<CompareRow>& rows, int bars) {
  std::string out = "setting,files,skipped,mean_total_ir,std_total_ir,seconds_per_file\n";
  for (const auto& r : rows) {
    out += csv_field(r.setting) + "," + std::to_string(r.files) + "," + std::to_string(r.skipped) + "," +
           number(r.mean_total_ir) + "," + number(r.std_total_ir) + "," + number(r.seconds_per_file) + "\n";
  }
  std::optional<double> seconds;
  for (std::size_t k = 0; k < kReferenceBars.size(); ++k) {
    if (kReferenceBars[k] == bars) seconds = reference_seconds()[k];
  }
  out += "paper-reported (Proposed),,," + number(reference_proposed(bars)) + ",," + number(seconds) + "\n";
  return out;
}

}  // namespace oracular::cli
