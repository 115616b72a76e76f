#include "oracular/training.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace oracular::cvrnn {

namespace {
const char* to_string(TrainingErrc code) {
  switch (code) {
    case TrainingErrc::kEmptyCorpus: return "EmptyCorpus";
    case TrainingErrc::kNoFullBatch: return "NoFullBatch";
  }
  return "Unknown";
}
}  // namespace

TrainingError::TrainingError(TrainingErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw std::invalid_argument("dropout_p must lie in [0, 1)");
  if (z_dim == 0) throw std::invalid_argument("z_dim must be positive");
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be positive");
}

AdamState AdamState::zeros_like(const CvrnnParams& params) {
  return {CvrnnParams::zeros(params.arch), CvrnnParams::zeros(params.arch), 0};
}

void clip_gradients(CvrnnParams& grads, double clip_norm) {
  for (auto& [name, g] : grads.named_tensors()) {
    const double norm = std::sqrt(g->squared_norm());
    if (norm > clip_norm) {
      const double scale = clip_norm / norm;
      for (double& v : g->values()) v *= scale;
    }
  }
}

void adam_update(CvrnnParams& params, const CvrnnParams& grads, AdamState& state, double learning_rate) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double correction2 = 1.0 - std::pow(AdamState::kBeta2, t);

  auto p = params.named_tensors();
  const auto g = grads.named_tensors();
  auto m = state.first_moment.named_tensors();
  auto v = state.second_moment.named_tensors();
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto pv = p[i].second->values();
    const auto gv = g[i].second->values();
    auto mv = m[i].second->values();
    auto vv = v[i].second->values();
    if (pv.size() != gv.size()) throw ShapeMismatch("gradient shape differs for " + p[i].first);
    for (std::size_t k = 0; k < pv.size(); ++k) {
      mv[k] = AdamState::kBeta1 * mv[k] + (1.0 - AdamState::kBeta1) * gv[k];
      vv[k] = AdamState::kBeta2 * vv[k] + (1.0 - AdamState::kBeta2) * gv[k] * gv[k];
      const double m_hat = mv[k] / correction1;
      const double v_hat = vv[k] / correction2;
      pv[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
    }
  }
}

TrainResult train(const std::vector<midi::PianoRoll>& corpus, const TrainingConfig& config, Architecture arch,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (corpus.empty()) throw TrainingError(TrainingErrc::kEmptyCorpus, "no songs to train on");
  arch.z_dim = config.z_dim;
  arch.validate();
  if (arch.frame_steps != midi::kStepsPerFrame || arch.note_range != midi::kNumPitches) {
    throw std::invalid_argument("training on piano-rolls needs 4x128 frames");
  }

  std::vector<Batch> batches;
  for (const auto& song : corpus) {
    const midi::FrameSequence frames = midi::piano_roll_to_frames(song);
    for (std::size_t first = 0; first + arch.seq_len <= frames.size(); first += arch.seq_len) {
      batches.push_back(to_batch(frames, first, arch.seq_len));
    }
  }
  if (batches.empty()) {
    throw TrainingError(TrainingErrc::kNoFullBatch,
                        "no song is long enough for one batch of " + std::to_string(arch.seq_len) + " frames");
  }

  std::mt19937_64 rng(config.rng_seed);
  TrainResult result{CvrnnParams::initialize(arch, rng), {}};
  AdamState adam = AdamState::zeros_like(result.params);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochLoss sum;
    for (const auto& batch : batches) {
      const Noise noise = Noise::sample(arch, config.mc_samples, config.dropout_p, rng);
      BackpropResult step = backprop(result.params, batch, noise);
      clip_gradients(step.gradients, config.clip_norm);
      adam_update(result.params, step.gradients, adam, config.learning_rate);
      sum.kl += step.loss.kl;
      sum.reconstruction += step.loss.reconstruction;
      sum.total += step.loss.total;
    }
    const double n = static_cast<double>(batches.size());
    const EpochLoss mean{sum.kl / n, sum.reconstruction / n, sum.total / n};
    result.history.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return result;
}

std::string loss_history_csv(const std::vector<EpochLoss>& history) {
  std::string out = "epoch,kl,reconstruction,total\n";
  char buf[128];
  for (std::size_t e = 0; e < history.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e + 1, history[e].kl, history[e].reconstruction,
                  history[e].total);
    out += buf;
  }
  return out;
}

midi::PianoRoll generate(const CvrnnParams& params, double num_bars, std::uint64_t rng_seed, Binarize mode) {
  const Architecture& a = params.arch;
  if (a.frame_steps != midi::kStepsPerFrame || a.note_range != midi::kNumPitches) {
    throw std::invalid_argument("generation needs 4x128 frames");
  }
  const double frames_real = num_bars * 2.0;
  if (!(frames_real >= 1.0) || frames_real != std::floor(frames_real) || frames_real > 1e6) {
    throw std::invalid_argument("num_bars must be a positive multiple of 0.5");
  }
  const auto num_frames = static_cast<std::size_t>(frames_real);

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector z(a.z_dim);
  for (double& v : z) v = normal(rng);

  midi::PianoRoll roll(num_frames * a.frame_steps);
  Vector h(a.decoder_hidden, 0.0);
  Vector input = z;
  Frame frame(a.frame_size());
  for (std::size_t f = 0; f < num_frames; ++f) {
    h = gru_step(params.decoder, input, h, a.candidate_bias);
    const Vector logits = linalg::affine(params.w_p, params.b_p, h);
    for (std::size_t c = 0; c < frame.size(); ++c) {
      const double prob = linalg::sigmoid(logits[c]);
      const bool on = mode == Binarize::kThreshold ? prob > 0.5 : uniform(rng) < prob;
      frame[c] = on ? 1.0 : 0.0;
      if (on) roll.set(f * a.frame_steps + c / a.note_range, c % a.note_range);
    }
    input = linalg::affine(params.w_z, params.b_z, cnn_forward(params, frame));
  }
  return roll;
}

}  // namespace oracular::cvrnn
