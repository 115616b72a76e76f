#include "oracular/serialize.hpp"

#include <cstdio>

#include "json.hpp"

namespace oracular {

namespace {

using nlohmann::json;

json profile_json(const oracle::IRProfile& p) {
  return json{{"theta", p.theta},
              {"total", p.total},
              {"c0_total", p.c0_total},
              {"c1_total", p.c1_total},
              {"per_frame", p.per_frame}};
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_json(const oracle::IRProfile& profile) { return profile_json(profile).dump(); }

std::string to_json(const oracle::SweepResult& sweep) {
  json curve = json::array();
  for (const auto& [theta, total] : sweep.curve) curve.push_back({theta, total});
  return json{{"theta_star", sweep.theta_star},
              {"total", sweep.best.total},
              {"curve", std::move(curve)},
              {"per_frame", sweep.best.per_frame}}
      .dump();
}

std::string to_json(const oracle::MotifSet& motifs) {
  json patterns = json::array();
  for (const auto& p : motifs.patterns) patterns.push_back({{"length", p.length}, {"occurrences", p.occurrences}});
  return json{{"patterns", std::move(patterns)}}.dump();
}

std::string curve_to_csv(const oracle::SweepResult& sweep) {
  std::string out = "theta,total_ir\n";
  for (const auto& [theta, total] : sweep.curve) out += number(theta) + "," + number(total) + "\n";
  return out;
}

std::string to_csv(const oracle::IRProfile& profile) {
  std::string out = "frame,ir\n";
  for (std::size_t i = 0; i < profile.per_frame.size(); ++i) {
    out += std::to_string(i) + "," + number(profile.per_frame[i]) + "\n";
  }
  return out;
}

std::string to_csv(const oracle::MotifSet& motifs) {
  std::string out = "pattern_index,occurrence_end_frame,length\n";
  for (std::size_t k = 0; k < motifs.patterns.size(); ++k) {
    const auto& p = motifs.patterns[k];
    for (std::size_t end : p.occurrences) {
      out += std::to_string(k) + "," + std::to_string(end) + "," + std::to_string(p.length) + "\n";
    }
  }
  return out;
}

}  // namespace oracular
