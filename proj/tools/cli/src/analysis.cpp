#include "oracular_cli/analysis.hpp"

#include "json.hpp"

namespace oracular::cli {

using nlohmann::ordered_json;

const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows = {
      {"Nottingham original", {4974.61, 7412.91, 18567.01}},
      {"Proposed", {3463.81, 6047.28, 16044.91}},
      {"PolyphonyRNN", {3023.44, 6027.04, 15425.27}},
      {"AttentionRNN", {3381.71, 5712.87, 14192.60}},
      {"MidiNet", {3117.68, std::nullopt, std::nullopt}},
  };
  return rows;
}

const std::array<double, 3>& reference_seconds() {
  static const std::array<double, 3> seconds = {15.3, 29.2, 67.0};
  return seconds;
}

std::optional<double> reference_proposed(int bars) {
  for (std::size_t k = 0; k < kReferenceBars.size(); ++k) {
    if (kReferenceBars[k] == bars) return reference_table()[1].total_ir[k];
  }
  return std::nullopt;
}

AnalysisReport analyze_roll(const midi::PianoRoll& roll, const std::string& source, std::size_t hop,
                            std::size_t min_motif_len) {
  const features::ChromaSequence chroma = features::chroma_from_piano_roll(roll, hop);
  const oracle::DistanceMatrix dist(chroma);
  const oracle::SweepResult sweep = oracle::sweep_threshold(chroma);

  AnalysisReport r;
  r.source = source;
  r.num_steps = roll.num_steps();
  r.hop = hop;
  r.num_frames = chroma.size();
  r.theta_star = sweep.theta_star;
  r.total_ir = sweep.best.total;
  r.ir_curve = sweep.curve;
  r.min_motif_len = min_motif_len;
  r.motifs = oracle::find_motifs(oracle::build_oracle(dist, sweep.theta_star), min_motif_len);
  return r;
}

midi::PianoRoll load_roll(const std::string& path) {
  return midi::quantize(midi::parse_smf(midi::read_file_bytes(path)));
}

AnalysisReport analyze_file(const std::string& path, std::size_t hop, std::size_t min_motif_len) {
  return analyze_roll(load_roll(path), path, hop, min_motif_len);
}

std::string report_to_json(const AnalysisReport& r) {
  ordered_json curve = ordered_json::array();
  for (const auto& [theta, total] : r.ir_curve) curve.push_back({theta, total});

  ordered_json patterns = ordered_json::array();
  for (const auto& p : r.motifs.patterns) patterns.push_back({{"length", p.length}, {"occurrences", p.occurrences}});

  ordered_json rows = ordered_json::array();
  for (const auto& row : reference_table()) {
    ordered_json values = ordered_json::array();
    for (const auto& v : row.total_ir) values.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
    rows.push_back({{"name", row.name}, {"total_ir", values}});
  }

  ordered_json j;
  j["source"] = r.source;
  j["num_steps"] = r.num_steps;
  j["hop"] = r.hop;
  j["num_frames"] = r.num_frames;
  j["theta_star"] = r.theta_star;
  j["total_ir"] = r.total_ir;
  j["ir_curve"] = curve;
  j["motifs"] = {{"min_len", r.min_motif_len}, {"count", r.motifs.patterns.size()}, {"patterns", patterns}};
  j["reference_table"] = {{"label", kReferenceLabel},
                          {"bars", kReferenceBars},
                          {"rows", rows},
                          {"time_s", reference_seconds()}};
  return j.dump(2) + "\n";
}

}  // namespace oracular::cli
