#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xmvae {

/// Dense row-major tensor of 64-bit reals. Rank 0 is a scalar (one element).
/// Immutable by convention once handed to the tape; plain value semantics.
class Tensor {
 public:
  Tensor() : data_(1, 0.0) {}
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }

  /// Row/column accessors for rank-2 use; rows() of a rank-1 tensor is 1.
  std::size_t rows() const { return rank() >= 2 ? shape_[0] : 1; }
  std::size_t cols() const { return rank() >= 1 ? shape_.back() : 1; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  /// Value of a single-element tensor; throws ShapeError otherwise.
  double item() const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const Tensor& t);

// Forward kernels shared by the gradient tape and the no-tape evaluation
// path. All of them allocate their result; none mutate inputs.
namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor multiply(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // throws DomainError on non-positive input
Tensor square(const Tensor& a);
Tensor sum(const Tensor& a);   // rank-0 result
Tensor mean(const Tensor& a);  // rank-0 result
Tensor concat_last(const Tensor& a, const Tensor& b);
Tensor slice_last(const Tensor& a, std::size_t offset, std::size_t count);
Tensor broadcast_add_bias(const Tensor& x, const Tensor& bias);

Tensor scale(const Tensor& a, double c);
Tensor clamp(const Tensor& a, double lo, double hi);

/// y += alpha * x (shapes must match).
void axpy(double alpha, const Tensor& x, Tensor& y);

/// C = alpha * op(A) * op(B) + beta * C for rank-2 tensors.
void gemm_acc(bool trans_a, bool trans_b, double alpha, const Tensor& a,
              const Tensor& b, double beta, Tensor& c);

/// Gathers the given rows of a rank-2 tensor into a new [n x cols] tensor.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);

}  // namespace ops

}  // namespace xmvae
