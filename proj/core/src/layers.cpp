#include "oracular/layers.hpp"

#include <cmath>

namespace oracular::cvrnn {

void conv3x3_forward(std::span<const double> in, FeatureMapShape shape, const Tensor& w, const Tensor& b,
                     std::span<double> out) {
  const std::size_t cin = shape.channels, h = shape.height, wd = shape.width;
  const std::size_t cout = w.dim(0);
  if (w.rank() != 4 || w.dim(1) != cin || w.dim(2) != 3 || w.dim(3) != 3 || b.size() != cout) {
    throw ShapeMismatch("conv kernel " + w.shape_string() + " for " + std::to_string(cin) + " input channels");
  }
  if (in.size() != shape.size() || out.size() != cout * h * wd) throw ShapeMismatch("conv feature map size");

  for (std::size_t o = 0; o < cout; ++o) {
    double* plane = out.data() + o * h * wd;
    for (std::size_t p = 0; p < h * wd; ++p) plane[p] = b[o];
    for (std::size_t c = 0; c < cin; ++c) {
      const double* src = in.data() + c * h * wd;
      for (std::size_t ki = 0; ki < 3; ++ki) {
        for (std::size_t kj = 0; kj < 3; ++kj) {
          const double k = w[((o * cin + c) * 3 + ki) * 3 + kj];
          if (k == 0.0) continue;
          // Output (i, j) reads input (i + ki - 1, j + kj - 1).
          const std::size_t i0 = ki == 0 ? 1 : 0, i1 = ki == 2 ? h - 1 : h;
          const std::size_t j0 = kj == 0 ? 1 : 0, j1 = kj == 2 ? wd - 1 : wd;
          for (std::size_t i = i0; i < i1; ++i) {
            const double* srow = src + (i + ki - 1) * wd;
            double* drow = plane + i * wd;
            for (std::size_t j = j0; j < j1; ++j) drow[j] += k * srow[j + kj - 1];
          }
        }
      }
    }
  }
}

void conv3x3_backward(std::span<const double> in, FeatureMapShape shape, const Tensor& w,
                      std::span<const double> dout, Tensor& dw, Tensor& db, std::span<double> din) {
  const std::size_t cin = shape.channels, h = shape.height, wd = shape.width;
  const std::size_t cout = w.dim(0);
  for (std::size_t o = 0; o < cout; ++o) {
    const double* g = dout.data() + o * h * wd;
    double bias_grad = 0.0;
    for (std::size_t p = 0; p < h * wd; ++p) bias_grad += g[p];
    db[o] += bias_grad;
    for (std::size_t c = 0; c < cin; ++c) {
      const double* src = in.data() + c * h * wd;
      double* dsrc = din.empty() ? nullptr : din.data() + c * h * wd;
      for (std::size_t ki = 0; ki < 3; ++ki) {
        for (std::size_t kj = 0; kj < 3; ++kj) {
          const std::size_t widx = ((o * cin + c) * 3 + ki) * 3 + kj;
          const double k = w[widx];
          const std::size_t i0 = ki == 0 ? 1 : 0, i1 = ki == 2 ? h - 1 : h;
          const std::size_t j0 = kj == 0 ? 1 : 0, j1 = kj == 2 ? wd - 1 : wd;
          double acc = 0.0;
          for (std::size_t i = i0; i < i1; ++i) {
            const std::size_t off = (i + ki - 1) * wd;
            const double* grow = g + i * wd;
            const double* srow = src + off;
            for (std::size_t j = j0; j < j1; ++j) acc += grow[j] * srow[j + kj - 1];
            if (dsrc) {
              double* drow = dsrc + off;
              for (std::size_t j = j0; j < j1; ++j) drow[j + kj - 1] += k * grow[j];
            }
          }
          dw[widx] += acc;
        }
      }
    }
  }
}

void maxpool2_forward(std::span<const double> in, FeatureMapShape shape, std::span<double> out,
                      std::span<std::size_t> argmax) {
  const std::size_t oh = shape.height / 2, ow = shape.width / 2;
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        std::size_t best = (c * shape.height + 2 * i) * shape.width + 2 * j;
        for (std::size_t di = 0; di < 2; ++di) {
          for (std::size_t dj = 0; dj < 2; ++dj) {
            const std::size_t idx = (c * shape.height + 2 * i + di) * shape.width + 2 * j + dj;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (c * oh + i) * ow + j;
        out[o] = in[best];
        argmax[o] = best;
      }
    }
  }
}

namespace {

void relu_inplace(std::span<double> v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace

CnnTrace cnn_trace(const CvrnnParams& params, std::span<const double> frame) {
  const Architecture& a = params.arch;
  if (frame.size() != a.frame_size()) {
    throw ShapeMismatch("frame of " + std::to_string(frame.size()) + " cells, expected " +
                        std::to_string(a.frame_size()));
  }
  const FeatureMapShape in{1, a.frame_steps, a.note_range};
  const FeatureMapShape c1{a.conv1_filters, a.frame_steps, a.note_range};
  const FeatureMapShape p1{a.conv1_filters, a.frame_steps / 2, a.note_range / 2};
  const FeatureMapShape c2{a.conv2_filters, p1.height, p1.width};

  CnnTrace t;
  t.conv1.assign(c1.size(), 0.0);
  conv3x3_forward(frame, in, params.conv1_w, params.conv1_b, t.conv1);
  relu_inplace(t.conv1);
  t.pool1.assign(p1.size(), 0.0);
  t.pool1_argmax.assign(p1.size(), 0);
  maxpool2_forward(t.conv1, c1, t.pool1, t.pool1_argmax);
  t.conv2.assign(c2.size(), 0.0);
  conv3x3_forward(t.pool1, p1, params.conv2_w, params.conv2_b, t.conv2);
  relu_inplace(t.conv2);
  t.features.assign(a.feature_size(), 0.0);
  t.pool2_argmax.assign(a.feature_size(), 0);
  maxpool2_forward(t.conv2, c2, t.features, t.pool2_argmax);
  return t;
}

void cnn_backward(const CvrnnParams& params, std::span<const double> frame, const CnnTrace& t,
                  std::span<const double> dfeatures, CvrnnParams& grads) {
  const Architecture& a = params.arch;
  const FeatureMapShape in{1, a.frame_steps, a.note_range};
  const FeatureMapShape p1{a.conv1_filters, a.frame_steps / 2, a.note_range / 2};

  Vector dconv2(t.conv2.size(), 0.0);
  for (std::size_t o = 0; o < dfeatures.size(); ++o) dconv2[t.pool2_argmax[o]] += dfeatures[o];
  for (std::size_t i = 0; i < dconv2.size(); ++i) {
    if (t.conv2[i] <= 0.0) dconv2[i] = 0.0;
  }
  Vector dpool1(t.pool1.size(), 0.0);
  conv3x3_backward(t.pool1, p1, params.conv2_w, dconv2, grads.conv2_w, grads.conv2_b, dpool1);

  Vector dconv1(t.conv1.size(), 0.0);
  for (std::size_t o = 0; o < dpool1.size(); ++o) dconv1[t.pool1_argmax[o]] += dpool1[o];
  for (std::size_t i = 0; i < dconv1.size(); ++i) {
    if (t.conv1[i] <= 0.0) dconv1[i] = 0.0;
  }
  conv3x3_backward(frame, in, params.conv1_w, dconv1, grads.conv1_w, grads.conv1_b, {});
}

GruTrace gru_trace(const GruCell& cell, std::span<const double> x, std::span<const double> h_prev,
                   CandidateBias bias) {
  const std::size_t hidden = cell.hidden_size();
  if (x.size() != cell.input_size() || h_prev.size() != hidden) {
    throw ShapeMismatch("GRU with input " + std::to_string(cell.input_size()) + " and hidden " +
                        std::to_string(hidden) + " given x of " + std::to_string(x.size()) + " and h of " +
                        std::to_string(h_prev.size()));
  }
  GruTrace t;
  t.x.assign(x.begin(), x.end());
  t.h_prev.assign(h_prev.begin(), h_prev.end());

  t.s = linalg::affine(cell.w_s, cell.b_s, x);
  linalg::matvec_add(cell.u_s, h_prev, t.s);
  t.r = linalg::affine(cell.w_r, cell.b_r, x);
  linalg::matvec_add(cell.u_r, h_prev, t.r);
  for (std::size_t i = 0; i < hidden; ++i) {
    t.s[i] = linalg::sigmoid(t.s[i]);
    t.r[i] = linalg::sigmoid(t.r[i]);
  }

  Vector rh(hidden);
  for (std::size_t i = 0; i < hidden; ++i) rh[i] = t.r[i] * h_prev[i];
  t.c = linalg::affine(cell.w_h, bias == CandidateBias::kReset ? cell.b_r : cell.b_h, x);
  linalg::matvec_add(cell.u_h, rh, t.c);

  t.h.resize(hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    t.c[i] = std::tanh(t.c[i]);
    t.h[i] = t.s[i] * h_prev[i] + (1.0 - t.s[i]) * t.c[i];
  }
  return t;
}

Vector gru_backward(const GruCell& cell, const GruTrace& t, std::span<const double> dh, CandidateBias bias,
                    GruCell& grads, std::span<double> dx) {
  const std::size_t hidden = cell.hidden_size();
  Vector dh_prev(hidden), ds(hidden), dc(hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    dh_prev[i] = dh[i] * t.s[i];
    ds[i] = dh[i] * (t.h_prev[i] - t.c[i]) * t.s[i] * (1.0 - t.s[i]);
    dc[i] = dh[i] * (1.0 - t.s[i]) * (1.0 - t.c[i] * t.c[i]);
  }

  Vector rh(hidden);
  for (std::size_t i = 0; i < hidden; ++i) rh[i] = t.r[i] * t.h_prev[i];
  linalg::outer_add(grads.w_h, dc, t.x);
  linalg::outer_add(grads.u_h, dc, rh);
  linalg::add((bias == CandidateBias::kReset ? grads.b_r : grads.b_h).values(), dc);

  Vector drh(hidden, 0.0);
  linalg::matvec_transpose_add(cell.u_h, dc, drh);
  Vector dr(hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    dh_prev[i] += drh[i] * t.r[i];
    dr[i] = drh[i] * t.h_prev[i] * t.r[i] * (1.0 - t.r[i]);
  }

  linalg::outer_add(grads.w_s, ds, t.x);
  linalg::outer_add(grads.u_s, ds, t.h_prev);
  linalg::add(grads.b_s.values(), ds);
  linalg::outer_add(grads.w_r, dr, t.x);
  linalg::outer_add(grads.u_r, dr, t.h_prev);
  linalg::add(grads.b_r.values(), dr);

  linalg::matvec_transpose_add(cell.u_s, ds, dh_prev);
  linalg::matvec_transpose_add(cell.u_r, dr, dh_prev);
  if (!dx.empty()) {
    linalg::matvec_transpose_add(cell.w_s, ds, dx);
    linalg::matvec_transpose_add(cell.w_r, dr, dx);
    linalg::matvec_transpose_add(cell.w_h, dc, dx);
  }
  return dh_prev;
}

}  // namespace oracular::cvrnn
