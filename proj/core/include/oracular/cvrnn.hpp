#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oracular/midi.hpp"
#include "oracular/tensor.hpp"

namespace oracular::cvrnn {

/// Bias used inside the GRU candidate activation. The published cell
/// equations write b_r there; kCandidate switches to a dedicated b_h.
enum class CandidateBias { kReset, kCandidate };

struct Architecture {
  std::size_t frame_steps = midi::kStepsPerFrame;  // n
  std::size_t note_range = midi::kNumPitches;      // r
  std::size_t conv1_filters = 16;
  std::size_t conv2_filters = 32;
  std::size_t encoder_hidden = 256;
  std::size_t decoder_hidden = 512;
  std::size_t z_dim = 64;
  std::size_t seq_len = midi::kFramesPerBatch;  // T
  CandidateBias candidate_bias = CandidateBias::kReset;

  std::size_t frame_size() const { return frame_steps * note_range; }
  /// k: flattened size after two 2x2 poolings.
  std::size_t feature_size() const { return conv2_filters * (frame_steps / 4) * (note_range / 4); }

  /// Throws std::invalid_argument for zero sizes or frames not divisible by 4.
  void validate() const;

  /// Hidden 8/8, z 4, 4x12 frames, T = 3. Used for gradient checking.
  static Architecture shrunken();

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct GruCell {
  Tensor w_s, u_s, b_s;  // update gate
  Tensor w_r, u_r, b_r;  // reset gate
  Tensor w_h, u_h, b_h;  // candidate

  static GruCell zeros(std::size_t input, std::size_t hidden);
  std::size_t input_size() const { return w_s.dim(1); }
  std::size_t hidden_size() const { return w_s.dim(0); }
};

/// All learnable weights. Also used, with identical shapes, to hold
/// gradients and optimizer moments.
struct CvrnnParams {
  Architecture arch;
  Tensor conv1_w, conv1_b;  // (c1, 1, 3, 3), (c1)
  Tensor conv2_w, conv2_b;  // (c2, c1, 3, 3), (c2)
  GruCell encoder;          // input k, hidden e
  Tensor w_mu, b_mu;        // e -> z
  Tensor w_sigma, b_sigma;  // e -> z
  Tensor w_z, b_z;          // k -> z
  GruCell decoder;          // input z, hidden d
  Tensor w_p, b_p;          // d -> n*r

  static CvrnnParams zeros(const Architecture& arch);
  /// Glorot-uniform matrices, He-normal convolutions, zero biases.
  static CvrnnParams initialize(const Architecture& arch, std::mt19937_64& rng);

  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  std::size_t parameter_count() const;
};

using Frame = Vector;  // n*r cells in {0, 1}, row-major [step][pitch]
using Batch = std::vector<Frame>;

/// Frames [first, first + count) of a sequence as model input.
Batch to_batch(const midi::FrameSequence& frames, std::size_t first, std::size_t count);

struct LatentGaussian {
  Vector mu;
  Vector sigma;  // > 0
};

/// Negative ELBO split into its two terms (nats). Minimizing `total` is
/// maximizing the evidence lower bound; `kl` plays the role of the latent
/// entropy term and `reconstruction` the data term of the free energy.
struct ElboBreakdown {
  double kl = 0.0;
  double reconstruction = 0.0;
  double total = 0.0;
};

/// Inverted-dropout multipliers (0 or 1/(1-p)). An empty list disables
/// dropout at that site.
struct DropoutMasks {
  std::vector<Vector> features;  // per frame, length k (CNN output)
  std::vector<Vector> decoder;   // per step, length d (decoder GRU output)
};

/// Every random input of one training step, drawn up front so that losses
/// and gradients are pure functions of (batch, params, noise).
struct Noise {
  std::vector<Vector> epsilon;  // one z-vector per Monte-Carlo sample
  DropoutMasks masks;

  static Noise sample(const Architecture& arch, std::size_t mc_samples, double dropout_p, std::mt19937_64& rng);
};

/// conv(3x3, c1, same) -> ReLU -> maxpool 2x2 -> conv(3x3, c2, same) -> ReLU
/// -> maxpool 2x2 -> flatten. Output length k.
Vector cnn_forward(const CvrnnParams& params, std::span<const double> frame);

/// One GRU update, gates evaluated as s, r, then the candidate.
Vector gru_step(const GruCell& cell, std::span<const double> x, std::span<const double> h_prev,
                CandidateBias bias = CandidateBias::kReset);

/// Final encoder state after reading every frame from a zero state.
Vector encode(const CvrnnParams& params, const Batch& frames);

/// mu = W_mu h + b_mu; sigma = softplus(W_sigma h + b_sigma) + 1e-6.
LatentGaussian latent_params(const CvrnnParams& params, std::span<const double> h_q);

/// z = mu + sigma * epsilon.
Vector reparameterize(const LatentGaussian& g, std::span<const double> epsilon);

/// Teacher-forced decoder logits, one n*r vector per step. Step 1 reads z
/// from a zero state; step t > 1 reads W_z m_l(frame t-1) + b_z.
std::vector<Vector> decode_sequence(const CvrnnParams& params, std::span<const double> z, const Batch& teacher,
                                    const DropoutMasks& masks = {});

/// -1/2 sum(1 + log sigma^2 - mu^2 - sigma^2).
double kl_divergence(const LatentGaussian& g);

/// Summed Bernoulli cross-entropy of binary frames under logistic(logits).
double reconstruction_loss(const Batch& batch, const std::vector<Vector>& logits);

/// kl = -1/2 sum(1 + log sigma^2 - mu^2 - sigma^2); reconstruction is the
/// summed Bernoulli cross-entropy averaged over the Monte-Carlo samples.
ElboBreakdown elbo_loss(const CvrnnParams& params, const Batch& batch, const Noise& noise);

struct BackpropResult {
  ElboBreakdown loss;
  CvrnnParams gradients;
};

/// Exact reverse-mode gradient of elbo_loss(params, batch, noise).total.
BackpropResult backprop(const CvrnnParams& params, const Batch& batch, const Noise& noise);

}  // namespace oracular::cvrnn
