#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracular/cvrnn.hpp"
#include "oracular/midi.hpp"

namespace oracular::cvrnn {

struct TrainingConfig {
  double learning_rate = 0.001;
  double clip_norm = 10.0;
  double dropout_p = 0.3;
  std::size_t epochs = 200;
  std::size_t z_dim = 64;
  std::size_t mc_samples = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  CvrnnParams first_moment;
  CvrnnParams second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const CvrnnParams& params);
};

/// Rescales each parameter tensor's gradient to `clip_norm` when its L2
/// norm exceeds it. Clipping is per tensor, not global.
void clip_gradients(CvrnnParams& grads, double clip_norm);

/// One bias-corrected Adam step.
void adam_update(CvrnnParams& params, const CvrnnParams& grads, AdamState& state, double learning_rate);

enum class TrainingErrc { kEmptyCorpus, kNoFullBatch };

class TrainingError : public std::runtime_error {
 public:
  TrainingError(TrainingErrc code, const std::string& what);
  TrainingErrc code() const noexcept { return code_; }

 private:
  TrainingErrc code_;
};

/// Epoch means of the per-batch losses.
struct EpochLoss {
  double kl = 0.0;
  double reconstruction = 0.0;
  double total = 0.0;
};

struct TrainResult {
  CvrnnParams params;
  std::vector<EpochLoss> history;
};

using EpochCallback = std::function<void(std::size_t epoch, const EpochLoss&)>;

/// Every epoch walks the songs in order and each song's non-overlapping
/// batches of arch.seq_len frames (a trailing partial batch is dropped):
/// forward, backprop, clip, Adam. Dropout is active and epsilon is fresh per
/// batch; everything is drawn from one generator seeded with rng_seed, so
/// the result is a pure function of (corpus, config, arch).
/// arch.z_dim is taken from config.z_dim.
TrainResult train(const std::vector<midi::PianoRoll>& corpus, const TrainingConfig& config,
                  Architecture arch = {}, const EpochCallback& on_epoch = {});

/// CSV with header "epoch,kl,reconstruction,total", epochs numbered from 1.
std::string loss_history_csv(const std::vector<EpochLoss>& history);

enum class Binarize { kThreshold, kBernoulli };

/// Samples z ~ N(0, I), decodes it at the first step, then feeds each
/// binarized output frame back through the CNN and W_z. Dropout is off.
/// kThreshold keeps cells with probability strictly above 0.5.
/// num_bars must be a positive multiple of 0.5 (one frame is half a bar);
/// the architecture must use full 128-pitch frames.
midi::PianoRoll generate(const CvrnnParams& params, double num_bars, std::uint64_t rng_seed,
                         Binarize mode = Binarize::kThreshold);

}  // namespace oracular::cvrnn
