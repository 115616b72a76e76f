// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "brute.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracular/checkpoint.hpp"
#include "oracular/cvrnn.hpp"
#include "oracular/features.hpp"
#include "oracular/midi.hpp"
#include "oracular/oracle.hpp"
#include "oracular/serialize.hpp"
#include "oracular/training.hpp"
#include "oracular_cli/analysis.hpp"

using namespace oracular;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr std::size_t kMaxStringLength = 12;
constexpr double kOracleSuiteSeconds = 60.0;
// Criterion 2
constexpr std::size_t kSweepSequences = 100;
constexpr std::size_t kSweepFrames = 50;
constexpr double kArgmaxTolerance = 1e-9;
// Criterion 3
constexpr std::size_t kRollsPerGroup = 10;
constexpr double kMinStructureRatio = 2.0;
// Criterion 4
constexpr std::size_t kMotifFrames = 32;
constexpr std::size_t kMinPatternLength = 4;
constexpr std::size_t kMinOccurrences = 6;
// Criterion 5
constexpr std::size_t kGradSeeds = 5;
constexpr double kMaxRelError = 1e-4;
constexpr double kGradSeconds = 120.0;
// Criterion 6
constexpr double kReconstructionTolerance = 1e-9;
// Criterion 7
constexpr std::size_t kOverfitEpochs = 200;
constexpr double kOverfitRatio = 0.10;
constexpr double kOverfitSeconds = 600.0;
// Criterion 8
constexpr std::size_t kGeneratedSamples = 30;
constexpr std::size_t kCheckpointEpochs = 20;
// Criterion 9
constexpr std::size_t kRoundTrips = 1000;
// Criterion 10
constexpr std::size_t kPerfBars = 32;
constexpr std::size_t kPerfHop = 4;
constexpr double kPerfSeconds = 5.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome oracle_correctness() {
  const auto start = Clock::now();
  std::size_t strings = 0;
  for (std::size_t alphabet = 1; alphabet <= 3; ++alphabet) {
    for (std::size_t len = 1; len <= kMaxStringLength; ++len) {
      for (const auto& s : fixtures::all_strings(alphabet, len)) {
        const auto check = fixtures::check_oracle_against_brute_force(s);
        ++strings;
        if (!check.factors_ok || !check.lrs_ok || !check.sfx_ok) {
          return {false, "\"" + s + "\": " + check.detail};
        }
      }
    }
  }
  const double secs = seconds_since(start);
  return {secs < kOracleSuiteSeconds,
          fmt("%zu strings, factors/lrs/sfx exact, %.1f s (limit %.0f s)", strings, secs, kOracleSuiteSeconds)};
}

Outcome sweep_argmax() {
  std::mt19937_64 rng(2);
  double worst_gap = 0.0;
  for (std::size_t k = 0; k < kSweepSequences; ++k) {
    const auto frames = fixtures::random_chroma(kSweepFrames, rng);
    const auto sweep = oracle::sweep_threshold(frames);
    const oracle::DistanceMatrix dist(frames);
    double best = -1.0;
    for (double theta : features::candidate_thresholds(frames)) {
      best = std::max(best, oracle::evaluate_threshold(dist, theta).total);
    }
    const double at_star = oracle::evaluate_threshold(dist, sweep.theta_star).total;
    worst_gap = std::max({worst_gap, std::abs(at_star - best), std::abs(sweep.best.total - best)});
    if (worst_gap > kArgmaxTolerance) return {false, fmt("sequence %zu: sweep %.12g vs max %.12g", k, at_star, best)};

    const auto again = oracle::sweep_threshold(frames);
    if (to_json(sweep) != to_json(again) ||
        curve_to_csv(sweep) != curve_to_csv(again)) {
      return {false, fmt("sequence %zu: repeated sweep serialized differently", k)};
    }
  }
  return {true, fmt("%zu sequences, max |IR(theta*) - max| = %.3g (tol %.0e), serialization identical",
                    kSweepSequences, worst_gap, kArgmaxTolerance)};
}

Outcome structure_ordering() {
  std::mt19937_64 rng(3);
  double structured = 0.0, scattered = 0.0;
  for (std::size_t k = 0; k < kRollsPerGroup; ++k) {
    const auto phrase = fixtures::phrase_roll(8, 2, fixtures::kPhraseDensity, rng);
    const auto noise = fixtures::scattered_roll(phrase.num_steps(), phrase.active_count(), rng);
    structured += oracle::total_ir(features::chroma_from_piano_roll(phrase));
    scattered += oracle::total_ir(features::chroma_from_piano_roll(noise));
  }
  structured /= kRollsPerGroup;
  scattered /= kRollsPerGroup;
  const double ratio = scattered > 0.0 ? structured / scattered : INFINITY;
  return {ratio >= kMinStructureRatio,
          fmt("mean total IR %.3f (repeated 2-bar phrase) vs %.3f (density-matched random), ratio %.2f (need >= %.1f)",
              structured, scattered, ratio, kMinStructureRatio)};
}

Outcome motif_detection() {
  std::string periodic;
  while (periodic.size() < kMotifFrames) periodic += "aceg";
  const auto fo = oracle::build_oracle(fixtures::symbols_to_chroma(periodic), 0.0);
  const auto motifs = oracle::find_motifs(fo, kMinPatternLength);
  std::size_t best_occ = 0, best_len = 0;
  for (const auto& p : motifs.patterns) {
    if (p.length >= kMinPatternLength && p.occurrences.size() > best_occ) {
      best_occ = p.occurrences.size();
      best_len = p.length;
    }
  }

  std::mt19937_64 rng(4);
  const auto distinct = fixtures::random_chroma(kMotifFrames, rng);
  const auto none = oracle::find_motifs(oracle::build_oracle(distinct, 0.0), kMinPatternLength);

  const bool ok = best_occ >= kMinOccurrences && none.patterns.empty();
  return {ok, fmt("period 4: pattern of length %zu with %zu occurrences (need >= %zu, >= %zu); all-distinct: %zu patterns",
                  best_len, best_occ, kMinPatternLength, kMinOccurrences, none.patterns.size())};
}

Outcome gradient_fidelity() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t coordinates = 0, redraws = 0;
  for (std::uint64_t seed = 1; seed <= kGradSeeds; ++seed) {
    const auto report = fixtures::gradient_check(seed);
    coordinates += report.coordinates;
    redraws += report.redraws;
    if (report.max_rel_error > worst) worst = report.max_rel_error;
  }
  const double secs = seconds_since(start);
  return {worst < kMaxRelError && secs < kGradSeconds,
          fmt("%zu seeds, %zu coordinates, max rel error %.3g (tol %.0e), %zu kink redraws, %.1f s (limit %.0f s)",
              kGradSeeds, coordinates, worst, kMaxRelError, redraws, secs, kGradSeconds)};
}

Outcome loss_anchors() {
  const cvrnn::Architecture arch;
  const double kl = cvrnn::kl_divergence({Vector(arch.z_dim, 0.0), Vector(arch.z_dim, 1.0)});

  std::mt19937_64 rng(6);
  const auto batch = fixtures::random_batch(arch, 0.3, rng);
  cvrnn::Noise noise;
  noise.epsilon.push_back(Vector(arch.z_dim, 0.0));
  const double recon = cvrnn::elbo_loss(cvrnn::CvrnnParams::zeros(arch), batch, noise).reconstruction;
  const double expected = static_cast<double>(arch.seq_len) * 512.0 * std::log(2.0);
  const double err = std::abs(recon - expected);
  return {kl == 0.0 && err <= kReconstructionTolerance,
          fmt("KL(0, I) = %g; reconstruction %.12f vs T*512*ln2 = %.12f (|diff| %.2g, tol %.0e)", kl, recon, expected,
              err, kReconstructionTolerance)};
}

Outcome toy_overfit() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  const std::vector<midi::PianoRoll> corpus = {fixtures::phrase_roll(8, 2, fixtures::kPhraseDensity, rng)};
  cvrnn::TrainingConfig config;
  config.epochs = kOverfitEpochs;
  config.rng_seed = 7;
  const auto first = cvrnn::train(corpus, config);
  const double secs = seconds_since(start);
  const auto second = cvrnn::train(corpus, config);

  bool identical = first.history.size() == second.history.size();
  for (std::size_t e = 0; identical && e < first.history.size(); ++e) {
    const auto &a = first.history[e], &b = second.history[e];
    identical = a.kl == b.kl && a.reconstruction == b.reconstruction && a.total == b.total;
  }
  const double ratio = first.history.back().reconstruction / first.history.front().reconstruction;
  return {ratio < kOverfitRatio && identical && secs < kOverfitSeconds,
          fmt("reconstruction %.2f -> %.2f (ratio %.4f, need < %.2f), history %s, %.0f s per run (limit %.0f s)",
              first.history.front().reconstruction, first.history.back().reconstruction, ratio, kOverfitRatio,
              identical ? "bit-identical" : "DIFFERS", secs, kOverfitSeconds)};
}

Outcome generation_contract() {
  std::mt19937_64 rng(8);
  std::vector<midi::PianoRoll> corpus;
  for (int k = 0; k < 3; ++k) corpus.push_back(fixtures::phrase_roll(8, 2, fixtures::kPhraseDensity, rng));
  cvrnn::TrainingConfig config;
  config.epochs = kCheckpointEpochs;
  config.rng_seed = 8;
  auto trained = cvrnn::train(corpus, config);

  const fs::path path = fs::temp_directory_path() / ("oracular_acceptance_" + std::to_string(::getpid()) + ".ckpt");
  cvrnn::save_checkpoint(path, {trained.params, config});
  const auto ckpt = cvrnn::load_checkpoint(path);
  fs::remove(path);

  const std::size_t expected_steps = 8 * 8;
  for (std::size_t s = 0; s < kGeneratedSamples; ++s) {
    const auto mode = s % 2 == 0 ? cvrnn::Binarize::kBernoulli : cvrnn::Binarize::kThreshold;
    const auto roll = cvrnn::generate(ckpt.params, 8, s, mode);
    if (roll.num_steps() != expected_steps) return {false, fmt("sample %zu has %zu steps", s, roll.num_steps())};
    if (!(roll == cvrnn::generate(ckpt.params, 8, s, mode))) return {false, fmt("seed %zu not reproducible", s)};
    const auto report = cli::analyze_roll(roll, "generated", 1, 4);
    bool finite = std::isfinite(report.total_ir);
    for (const auto& [theta, total] : report.ir_curve) finite = finite && std::isfinite(theta) && std::isfinite(total);
    if (!finite) return {false, fmt("sample %zu: non-finite IR", s)};
  }
  return {true, fmt("%zu samples of %zux%d from a reloaded checkpoint, all IR finite, seeds reproduce exactly",
                    kGeneratedSamples, expected_steps, midi::kNumPitches)};
}

std::vector<std::uint8_t> mutate(std::vector<std::uint8_t> bytes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> byte(0, 255), op(0, 5);
  const int edits = 1 + static_cast<int>(rng() % 6);
  for (int e = 0; e < edits && !bytes.empty(); ++e) {
    std::uniform_int_distribution<std::size_t> at(0, bytes.size() - 1);
    switch (op(rng)) {
      case 0: bytes[at(rng)] = static_cast<std::uint8_t>(byte(rng)); break;
      case 1: bytes[at(rng)] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); break;
      case 2: bytes.resize(at(rng)); break;
      case 3: bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(at(rng)), static_cast<std::uint8_t>(byte(rng))); break;
      case 4: bytes.erase(bytes.begin() + static_cast<std::ptrdiff_t>(at(rng))); break;
      default: {
        const std::size_t from = at(rng), to = at(rng), n = std::min<std::size_t>(rng() % 16, bytes.size() - from);
        std::vector<std::uint8_t> chunk(bytes.begin() + static_cast<std::ptrdiff_t>(from),
                                        bytes.begin() + static_cast<std::ptrdiff_t>(from + n));
        bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(to), chunk.begin(), chunk.end());
      }
    }
  }
  return bytes;
}

Outcome midi_roundtrip(double fuzz_seconds) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> len(1, 512), step(0, 511);
  std::uniform_int_distribution<int> pitch(0, 127);
  std::uniform_real_distribution<double> density(0.0, 0.2);
  const int tpqs[] = {24, 96, 480, 960};
  std::vector<std::vector<std::uint8_t>> seeds;
  for (std::size_t k = 0; k < kRoundTrips; ++k) {
    auto roll = fixtures::random_roll(len(rng), density(rng), rng);
    roll.set(step(rng) % roll.num_steps(), pitch(rng));
    const auto bytes = midi::write_smf(roll, tpqs[k % 4]);
    if (!(midi::quantize(midi::parse_smf(bytes)) == roll)) return {false, fmt("round trip %zu differs", k)};
    if (k < 32) seeds.push_back(bytes);
  }

  const auto start = Clock::now();
  std::size_t runs = 0, rejected = 0;
  std::uniform_int_distribution<int> byte(0, 255);
  while (seconds_since(start) < fuzz_seconds || runs == 0) {
    for (int inner = 0; inner < 256; ++inner, ++runs) {
      std::vector<std::uint8_t> input;
      if (runs % 16 == 0) {
        input = {'M', 'T', 'h', 'd', 0, 0, 0, 6};
        const std::size_t n = rng() % 64;
        for (std::size_t i = 0; i < n; ++i) input.push_back(static_cast<std::uint8_t>(byte(rng)));
      } else {
        input = mutate(seeds[rng() % seeds.size()], rng);
      }
      try {
        const auto doc = midi::parse_smf(input);
        const auto roll = midi::quantize(doc);
        (void)features::chroma_from_piano_roll(roll);
      } catch (const midi::MidiError&) {
        ++rejected;
      } catch (const std::exception& e) {
        return {false, fmt("fuzz input %zu escaped with %s", runs, e.what())};
      }
    }
  }
  return {true, fmt("%zu round trips bit-exact; %zu fuzz inputs in %.0f s, %zu rejected with typed errors, no crash",
                    kRoundTrips, runs, seconds_since(start), rejected)};
}

Outcome performance() {
  std::mt19937_64 rng(10);
  const fs::path path = fs::temp_directory_path() / ("oracular_acceptance_" + std::to_string(::getpid()) + ".mid");
  double worst = 0.0;
  std::size_t frames = 0;
  for (int k = 0; k < 2; ++k) {
    // A structured roll and a dense unstructured one (the latter has many more candidate thresholds).
    const auto roll = k == 0 ? fixtures::phrase_roll(kPerfBars, 2, fixtures::kPhraseDensity, rng)
                             : fixtures::random_roll(kPerfBars * 8, 0.05, rng);
    const auto bytes = midi::write_smf(roll);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return {false, "cannot write temporary MIDI file"};
    std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    const auto start = Clock::now();
    const auto report = cli::analyze_file(path.string(), kPerfHop, 4);
    worst = std::max(worst, seconds_since(start));
    frames = report.num_frames;
  }
  fs::remove(path);
  return {frames == 64 && worst < kPerfSeconds,
          fmt("32-bar input at hop %zu = %zu frames, slowest full analyze %.3f s (limit %.0f s)", kPerfHop, frames,
              worst, kPerfSeconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  double fuzz_seconds = 600.0;
  std::vector<int> only;
  app.add_option("--fuzz-seconds", fuzz_seconds, "Duration of the MIDI parser fuzz run")->check(CLI::NonNegativeNumber);
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 10))->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  // The fuzz run is the long one, so it goes last.
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, oracle_correctness},  {2, sweep_argmax},        {3, structure_ordering},
      {4, motif_detection},     {5, gradient_fidelity},   {6, loss_anchors},
      {7, toy_overfit},         {8, generation_contract}, {10, performance},
      {9, [&] { return midi_roundtrip(fuzz_seconds); }},
  };

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL", id, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
