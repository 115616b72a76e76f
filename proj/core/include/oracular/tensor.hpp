#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracular {

class ShapeMismatch : public std::invalid_argument {
 public:
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument("ShapeMismatch: " + what) {}
};

/// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Row-major element of a rank-2 tensor.
  double& at(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * shape_[1] + c]; }

  void fill(double v);
  double squared_norm() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

using Vector = std::vector<double>;

namespace linalg {

/// out += W x for W of shape (rows, cols).
void matvec_add(const Tensor& w, std::span<const double> x, std::span<double> out);
/// out += W^T y.
void matvec_transpose_add(const Tensor& w, std::span<const double> y, std::span<double> out);
/// dw += y x^T.
void outer_add(Tensor& dw, std::span<const double> y, std::span<const double> x);
void add(std::span<double> acc, std::span<const double> x);

/// W x + b.
Vector affine(const Tensor& w, const Tensor& b, std::span<const double> x);

double sigmoid(double x);
/// log(1 + e^x) without overflow.
double softplus(double x);

}  // namespace linalg

}  // namespace oracular
