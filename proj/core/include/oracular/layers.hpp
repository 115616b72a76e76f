#pragma once

// Building blocks of the model with their backward passes.

#include <cstddef>
#include <span>
#include <vector>

#include "oracular/cvrnn.hpp"
#include "oracular/tensor.hpp"

namespace oracular::cvrnn {

struct FeatureMapShape {
  std::size_t channels, height, width;
  std::size_t size() const { return channels * height * width; }
};

/// Same-padded 3x3 cross-correlation: out = b + w * in.
void conv3x3_forward(std::span<const double> in, FeatureMapShape shape, const Tensor& w, const Tensor& b,
                     std::span<double> out);
/// Accumulates dw, db and (when non-empty) din.
void conv3x3_backward(std::span<const double> in, FeatureMapShape shape, const Tensor& w,
                      std::span<const double> dout, Tensor& dw, Tensor& db, std::span<double> din);

/// Non-overlapping 2x2 max pooling. `argmax` records the winning input index
/// per output (first in scan order on ties).
void maxpool2_forward(std::span<const double> in, FeatureMapShape shape, std::span<double> out,
                      std::span<std::size_t> argmax);

struct CnnTrace {
  Vector conv1;  // after ReLU
  Vector pool1;
  std::vector<std::size_t> pool1_argmax;
  Vector conv2;  // after ReLU
  std::vector<std::size_t> pool2_argmax;
  Vector features;
};

CnnTrace cnn_trace(const CvrnnParams& params, std::span<const double> frame);
void cnn_backward(const CvrnnParams& params, std::span<const double> frame, const CnnTrace& trace,
                  std::span<const double> dfeatures, CvrnnParams& grads);

struct GruTrace {
  Vector x, h_prev, s, r, c, h;
};

GruTrace gru_trace(const GruCell& cell, std::span<const double> x, std::span<const double> h_prev,
                   CandidateBias bias);
/// Accumulates parameter gradients into `grads` and input gradient into
/// `dx` (skipped when empty); returns the gradient wrt h_prev.
Vector gru_backward(const GruCell& cell, const GruTrace& trace, std::span<const double> dh, CandidateBias bias,
                    GruCell& grads, std::span<double> dx);

}  // namespace oracular::cvrnn
