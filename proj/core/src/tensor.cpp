#include "oracular/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace oracular {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != product(shape_)) {
    throw ShapeMismatch("tensor of shape " + shape_string() + " given " + std::to_string(values_.size()) +
                        " values");
  }
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double Tensor::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

std::string Tensor::shape_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + ")";
}

namespace linalg {

void matvec_add(const Tensor& w, std::span<const double> x, std::span<double> out) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  if (x.size() != cols || out.size() != rows) {
    throw ShapeMismatch("matvec with W" + w.shape_string() + ", x of " + std::to_string(x.size()));
  }
  const double* row = w.data();
  for (std::size_t r = 0; r < rows; ++r, row += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    out[r] += acc;
  }
}

void matvec_transpose_add(const Tensor& w, std::span<const double> y, std::span<double> out) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  if (y.size() != rows || out.size() != cols) {
    throw ShapeMismatch("transposed matvec with W" + w.shape_string() + ", y of " + std::to_string(y.size()));
  }
  const double* row = w.data();
  for (std::size_t r = 0; r < rows; ++r, row += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * yr;
  }
}

void outer_add(Tensor& dw, std::span<const double> y, std::span<const double> x) {
  const std::size_t rows = dw.dim(0), cols = dw.dim(1);
  if (y.size() != rows || x.size() != cols) throw ShapeMismatch("outer product into " + dw.shape_string());
  double* row = dw.data();
  for (std::size_t r = 0; r < rows; ++r, row += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += yr * x[c];
  }
}

void add(std::span<double> acc, std::span<const double> x) {
  if (acc.size() != x.size()) throw ShapeMismatch("vector add of mismatched lengths");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

Vector affine(const Tensor& w, const Tensor& b, std::span<const double> x) {
  Vector out(b.values().begin(), b.values().end());
  matvec_add(w, x, out);
  return out;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace linalg

}  // namespace oracular
