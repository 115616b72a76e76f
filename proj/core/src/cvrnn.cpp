#include "oracular/cvrnn.hpp"

#include <cmath>
#include <stdexcept>

#include "oracular/layers.hpp"

namespace oracular::cvrnn {

namespace {

constexpr double kSigmaFloor = 1e-6;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

void glorot(Tensor& w, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.dim(0) + w.dim(1)));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.values()) v = dist(rng);
}

void he_normal(Tensor& w, std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(w.dim(1) * w.dim(2) * w.dim(3));
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (double& v : w.values()) v = dist(rng);
}

void glorot(GruCell& cell, std::mt19937_64& rng) {
  for (Tensor* w : {&cell.w_s, &cell.u_s, &cell.w_r, &cell.u_r, &cell.w_h, &cell.u_h}) glorot(*w, rng);
}

template <typename Params, typename Ptr>
std::vector<std::pair<std::string, Ptr>> collect(Params& p) {
  std::vector<std::pair<std::string, Ptr>> out = {
      {"conv1_w", &p.conv1_w}, {"conv1_b", &p.conv1_b}, {"conv2_w", &p.conv2_w}, {"conv2_b", &p.conv2_b},
  };
  auto cell = [&](const std::string& prefix, auto& c) {
    out.emplace_back(prefix + ".w_s", &c.w_s);
    out.emplace_back(prefix + ".u_s", &c.u_s);
    out.emplace_back(prefix + ".b_s", &c.b_s);
    out.emplace_back(prefix + ".w_r", &c.w_r);
    out.emplace_back(prefix + ".u_r", &c.u_r);
    out.emplace_back(prefix + ".b_r", &c.b_r);
    out.emplace_back(prefix + ".w_h", &c.w_h);
    out.emplace_back(prefix + ".u_h", &c.u_h);
    out.emplace_back(prefix + ".b_h", &c.b_h);
  };
  cell("encoder", p.encoder);
  out.emplace_back("w_mu", &p.w_mu);
  out.emplace_back("b_mu", &p.b_mu);
  out.emplace_back("w_sigma", &p.w_sigma);
  out.emplace_back("b_sigma", &p.b_sigma);
  out.emplace_back("w_z", &p.w_z);
  out.emplace_back("b_z", &p.b_z);
  cell("decoder", p.decoder);
  out.emplace_back("w_p", &p.w_p);
  out.emplace_back("b_p", &p.b_p);
  return out;
}

/// Binary cross-entropy of target x against logistic(logit).
double bce_with_logit(double x, double logit) { return linalg::softplus(logit) - x * logit; }

struct SampleTrace {
  Vector z;
  std::vector<GruTrace> steps;
  std::vector<Vector> outputs;  // decoder GRU output after dropout
  std::vector<Vector> logits;
};

struct ForwardTrace {
  std::vector<CnnTrace> cnn;
  std::vector<Vector> features;  // CNN output after dropout
  std::vector<GruTrace> encoder;
  Vector sigma_pre;
  LatentGaussian latent;
  std::vector<SampleTrace> samples;
  ElboBreakdown loss;
};

void apply_mask(Vector& v, const std::vector<Vector>& masks, std::size_t t) {
  if (masks.empty()) return;
  require(masks[t].size() == v.size(), "dropout mask length");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= masks[t][i];
}

void check_noise(const Architecture& a, const Noise& noise) {
  require(!noise.epsilon.empty(), "at least one epsilon sample is required");
  for (const auto& e : noise.epsilon) require(e.size() == a.z_dim, "epsilon length must equal z_dim");
  require(noise.masks.features.empty() || noise.masks.features.size() == a.seq_len, "one feature mask per frame");
  require(noise.masks.decoder.empty() || noise.masks.decoder.size() == a.seq_len, "one decoder mask per step");
}

void check_batch(const Architecture& a, const Batch& batch) {
  require(batch.size() == a.seq_len,
          "batch of " + std::to_string(batch.size()) + " frames, expected " + std::to_string(a.seq_len));
}

Vector decoder_input(const CvrnnParams& p, std::span<const double> z, const std::vector<Vector>& features,
                     std::size_t t) {
  if (t == 0) return Vector(z.begin(), z.end());
  return linalg::affine(p.w_z, p.b_z, features[t - 1]);
}

ForwardTrace run_forward(const CvrnnParams& p, const Batch& batch, const Noise& noise) {
  const Architecture& a = p.arch;
  check_batch(a, batch);
  check_noise(a, noise);
  const std::size_t steps = a.seq_len;

  ForwardTrace f;
  for (std::size_t t = 0; t < steps; ++t) {
    f.cnn.push_back(cnn_trace(p, batch[t]));
    Vector m = f.cnn.back().features;
    apply_mask(m, noise.masks.features, t);
    f.features.push_back(std::move(m));
  }

  Vector h(a.encoder_hidden, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    f.encoder.push_back(gru_trace(p.encoder, f.features[t], h, a.candidate_bias));
    h = f.encoder.back().h;
  }

  f.latent.mu = linalg::affine(p.w_mu, p.b_mu, h);
  f.sigma_pre = linalg::affine(p.w_sigma, p.b_sigma, h);
  f.latent.sigma.resize(a.z_dim);
  for (std::size_t j = 0; j < a.z_dim; ++j) f.latent.sigma[j] = linalg::softplus(f.sigma_pre[j]) + kSigmaFloor;

  f.loss.kl = kl_divergence(f.latent);

  const double inv_samples = 1.0 / static_cast<double>(noise.epsilon.size());
  for (const auto& eps : noise.epsilon) {
    SampleTrace s;
    s.z = reparameterize(f.latent, eps);
    Vector hp(a.decoder_hidden, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      const Vector u = decoder_input(p, s.z, f.features, t);
      s.steps.push_back(gru_trace(p.decoder, u, hp, a.candidate_bias));
      hp = s.steps.back().h;
      Vector o = hp;
      apply_mask(o, noise.masks.decoder, t);
      s.outputs.push_back(std::move(o));
      s.logits.push_back(linalg::affine(p.w_p, p.b_p, s.outputs.back()));
    }
    f.loss.reconstruction += reconstruction_loss(batch, s.logits) * inv_samples;
    f.samples.push_back(std::move(s));
  }
  f.loss.total = f.loss.kl + f.loss.reconstruction;
  return f;
}

}  // namespace

void Architecture::validate() const {
  if (frame_steps == 0 || note_range == 0 || frame_steps % 4 != 0 || note_range % 4 != 0) {
    throw std::invalid_argument("frame dimensions must be positive multiples of 4");
  }
  if (conv1_filters == 0 || conv2_filters == 0 || encoder_hidden == 0 || decoder_hidden == 0 || z_dim == 0 ||
      seq_len == 0) {
    throw std::invalid_argument("architecture sizes must be positive");
  }
}

Architecture Architecture::shrunken() {
  Architecture a;
  a.frame_steps = 4;
  a.note_range = 12;
  a.encoder_hidden = 8;
  a.decoder_hidden = 8;
  a.z_dim = 4;
  a.seq_len = 3;
  return a;
}

GruCell GruCell::zeros(std::size_t input, std::size_t hidden) {
  GruCell c;
  c.w_s = c.w_r = c.w_h = Tensor({hidden, input});
  c.u_s = c.u_r = c.u_h = Tensor({hidden, hidden});
  c.b_s = c.b_r = c.b_h = Tensor({hidden});
  return c;
}

CvrnnParams CvrnnParams::zeros(const Architecture& a) {
  a.validate();
  CvrnnParams p;
  p.arch = a;
  const std::size_t k = a.feature_size();
  p.conv1_w = Tensor({a.conv1_filters, 1, 3, 3});
  p.conv1_b = Tensor({a.conv1_filters});
  p.conv2_w = Tensor({a.conv2_filters, a.conv1_filters, 3, 3});
  p.conv2_b = Tensor({a.conv2_filters});
  p.encoder = GruCell::zeros(k, a.encoder_hidden);
  p.w_mu = p.w_sigma = Tensor({a.z_dim, a.encoder_hidden});
  p.b_mu = p.b_sigma = Tensor({a.z_dim});
  p.w_z = Tensor({a.z_dim, k});
  p.b_z = Tensor({a.z_dim});
  p.decoder = GruCell::zeros(a.z_dim, a.decoder_hidden);
  p.w_p = Tensor({a.frame_size(), a.decoder_hidden});
  p.b_p = Tensor({a.frame_size()});
  return p;
}

CvrnnParams CvrnnParams::initialize(const Architecture& a, std::mt19937_64& rng) {
  CvrnnParams p = zeros(a);
  he_normal(p.conv1_w, rng);
  he_normal(p.conv2_w, rng);
  glorot(p.encoder, rng);
  glorot(p.w_mu, rng);
  glorot(p.w_sigma, rng);
  glorot(p.w_z, rng);
  glorot(p.decoder, rng);
  glorot(p.w_p, rng);
  return p;
}

std::vector<std::pair<std::string, Tensor*>> CvrnnParams::named_tensors() {
  return collect<CvrnnParams, Tensor*>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> CvrnnParams::named_tensors() const {
  return collect<const CvrnnParams, const Tensor*>(*this);
}

std::size_t CvrnnParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named_tensors()) n += t->size();
  return n;
}

Batch to_batch(const midi::FrameSequence& frames, std::size_t first, std::size_t count) {
  if (first + count > frames.size()) throw std::out_of_range("batch extends past the frame sequence");
  Batch batch;
  batch.reserve(count);
  for (std::size_t f = first; f < first + count; ++f) {
    batch.emplace_back(frames.frames[f].begin(), frames.frames[f].end());
  }
  return batch;
}

Noise Noise::sample(const Architecture& a, std::size_t mc_samples, double dropout_p, std::mt19937_64& rng) {
  Noise noise;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < mc_samples; ++l) {
    Vector eps(a.z_dim);
    for (double& e : eps) e = normal(rng);
    noise.epsilon.push_back(std::move(eps));
  }
  if (dropout_p > 0.0) {
    std::bernoulli_distribution keep(1.0 - dropout_p);
    const double scale = 1.0 / (1.0 - dropout_p);
    auto draw = [&](std::size_t len) {
      Vector m(len);
      for (double& v : m) v = keep(rng) ? scale : 0.0;
      return m;
    };
    for (std::size_t t = 0; t < a.seq_len; ++t) noise.masks.features.push_back(draw(a.feature_size()));
    for (std::size_t t = 0; t < a.seq_len; ++t) noise.masks.decoder.push_back(draw(a.decoder_hidden));
  }
  return noise;
}

Vector cnn_forward(const CvrnnParams& params, std::span<const double> frame) {
  return cnn_trace(params, frame).features;
}

Vector gru_step(const GruCell& cell, std::span<const double> x, std::span<const double> h_prev, CandidateBias bias) {
  return gru_trace(cell, x, h_prev, bias).h;
}

Vector encode(const CvrnnParams& params, const Batch& frames) {
  check_batch(params.arch, frames);
  Vector h(params.arch.encoder_hidden, 0.0);
  for (const auto& frame : frames) h = gru_step(params.encoder, cnn_forward(params, frame), h, params.arch.candidate_bias);
  return h;
}

LatentGaussian latent_params(const CvrnnParams& params, std::span<const double> h_q) {
  require(h_q.size() == params.arch.encoder_hidden, "encoder state length");
  LatentGaussian g;
  g.mu = linalg::affine(params.w_mu, params.b_mu, h_q);
  g.sigma = linalg::affine(params.w_sigma, params.b_sigma, h_q);
  for (double& s : g.sigma) s = linalg::softplus(s) + kSigmaFloor;
  return g;
}

Vector reparameterize(const LatentGaussian& g, std::span<const double> epsilon) {
  require(epsilon.size() == g.mu.size(), "epsilon length must equal z_dim");
  Vector z(g.mu.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = g.mu[j] + g.sigma[j] * epsilon[j];
  return z;
}

std::vector<Vector> decode_sequence(const CvrnnParams& params, std::span<const double> z, const Batch& teacher,
                                    const DropoutMasks& masks) {
  const Architecture& a = params.arch;
  check_batch(a, teacher);
  require(z.size() == a.z_dim, "z length must equal z_dim");
  std::vector<Vector> features;
  for (std::size_t t = 0; t + 1 < teacher.size(); ++t) {
    Vector m = cnn_forward(params, teacher[t]);
    apply_mask(m, masks.features, t);
    features.push_back(std::move(m));
  }
  std::vector<Vector> logits;
  Vector h(a.decoder_hidden, 0.0);
  for (std::size_t t = 0; t < teacher.size(); ++t) {
    h = gru_step(params.decoder, decoder_input(params, z, features, t), h, a.candidate_bias);
    Vector o = h;
    apply_mask(o, masks.decoder, t);
    logits.push_back(linalg::affine(params.w_p, params.b_p, o));
  }
  return logits;
}

double kl_divergence(const LatentGaussian& g) {
  require(g.mu.size() == g.sigma.size(), "mu and sigma differ in length");
  double kl = 0.0;
  for (std::size_t j = 0; j < g.mu.size(); ++j) {
    const double mu = g.mu[j], sigma = g.sigma[j];
    kl += -0.5 * (1.0 + 2.0 * std::log(sigma) - mu * mu - sigma * sigma);
  }
  return kl;
}

double reconstruction_loss(const Batch& batch, const std::vector<Vector>& logits) {
  require(batch.size() == logits.size(), "one logit vector per frame");
  // Neumaier compensated sum over T * n * r cells.
  double sum = 0.0, carry = 0.0;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    require(batch[t].size() == logits[t].size(), "logit vector length differs from frame size");
    for (std::size_t c = 0; c < logits[t].size(); ++c) {
      const double term = bce_with_logit(batch[t][c], logits[t][c]);
      const double next = sum + term;
      carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
      sum = next;
    }
  }
  return sum + carry;
}

ElboBreakdown elbo_loss(const CvrnnParams& params, const Batch& batch, const Noise& noise) {
  return run_forward(params, batch, noise).loss;
}

BackpropResult backprop(const CvrnnParams& p, const Batch& batch, const Noise& noise) {
  const Architecture& a = p.arch;
  const ForwardTrace f = run_forward(p, batch, noise);
  BackpropResult result{f.loss, CvrnnParams::zeros(a)};
  CvrnnParams& g = result.gradients;
  const std::size_t steps = a.seq_len;

  std::vector<Vector> dfeatures(steps, Vector(a.feature_size(), 0.0));
  Vector dmu(a.z_dim), dsigma(a.z_dim);
  for (std::size_t j = 0; j < a.z_dim; ++j) {
    dmu[j] = f.latent.mu[j];
    dsigma[j] = f.latent.sigma[j] - 1.0 / f.latent.sigma[j];
  }

  const double inv_samples = 1.0 / static_cast<double>(noise.epsilon.size());
  for (std::size_t l = 0; l < f.samples.size(); ++l) {
    const SampleTrace& s = f.samples[l];
    Vector dh(a.decoder_hidden, 0.0);
    Vector dz(a.z_dim, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
      Vector dlogits(a.frame_size());
      for (std::size_t c = 0; c < dlogits.size(); ++c) {
        dlogits[c] = (linalg::sigmoid(s.logits[t][c]) - batch[t][c]) * inv_samples;
      }
      linalg::outer_add(g.w_p, dlogits, s.outputs[t]);
      linalg::add(g.b_p.values(), dlogits);
      Vector dout(a.decoder_hidden, 0.0);
      linalg::matvec_transpose_add(p.w_p, dlogits, dout);
      apply_mask(dout, noise.masks.decoder, t);
      linalg::add(dh, dout);

      Vector du(a.z_dim, 0.0);
      dh = gru_backward(p.decoder, s.steps[t], dh, a.candidate_bias, g.decoder, du);
      if (t == 0) {
        linalg::add(dz, du);
      } else {
        linalg::outer_add(g.w_z, du, f.features[t - 1]);
        linalg::add(g.b_z.values(), du);
        linalg::matvec_transpose_add(p.w_z, du, dfeatures[t - 1]);
      }
    }
    for (std::size_t j = 0; j < a.z_dim; ++j) {
      dmu[j] += dz[j];
      dsigma[j] += dz[j] * noise.epsilon[l][j];
    }
  }

  const Vector& h_q = f.encoder.back().h;
  Vector dsigma_pre(a.z_dim);
  for (std::size_t j = 0; j < a.z_dim; ++j) dsigma_pre[j] = dsigma[j] * linalg::sigmoid(f.sigma_pre[j]);
  linalg::outer_add(g.w_mu, dmu, h_q);
  linalg::add(g.b_mu.values(), dmu);
  linalg::outer_add(g.w_sigma, dsigma_pre, h_q);
  linalg::add(g.b_sigma.values(), dsigma_pre);

  Vector dh(a.encoder_hidden, 0.0);
  linalg::matvec_transpose_add(p.w_mu, dmu, dh);
  linalg::matvec_transpose_add(p.w_sigma, dsigma_pre, dh);
  for (std::size_t t = steps; t-- > 0;) {
    dh = gru_backward(p.encoder, f.encoder[t], dh, a.candidate_bias, g.encoder, dfeatures[t]);
  }

  for (std::size_t t = 0; t < steps; ++t) {
    apply_mask(dfeatures[t], noise.masks.features, t);
    cnn_backward(p, batch[t], f.cnn[t], dfeatures[t], g);
  }
  return result;
}

}  // namespace oracular::cvrnn
