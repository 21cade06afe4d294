#include "xmvae/tensor.hpp"

#include <cblas.h>

#include <cmath>
#include <string>

#include "xmvae/error.hpp"

namespace xmvae {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
  for (std::size_t e : shape_) {
    if (e == 0) throw ShapeError("tensor extents must be positive");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw ShapeError("tensor extents must be positive");
  }
  if (data_.size() != shape_product(shape_)) {
    throw ShapeError("tensor data length does not match shape product");
  }
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
  Tensor t(std::move(shape));
  for (double& x : t.data_) x = v;
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() requires a single-element tensor");
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string shape_string(const Tensor& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape()[i]);
  }
  return s + "]";
}

namespace ops {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a) +
                     " vs " + shape_string(b));
  }
}

void require_rank2(const Tensor& a, const char* op) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected rank-2 tensor, got " +
                     shape_string(a));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.extent(1) != b.extent(0)) {
    throw ShapeError("matmul: inner extents disagree, " + shape_string(a) +
                     " * " + shape_string(b));
  }
  Tensor c({a.extent(0), b.extent(1)});
  gemm_acc(false, false, 1.0, a, b, 0.0, c);
  return c;
}

void gemm_acc(bool trans_a, bool trans_b, double alpha, const Tensor& a,
              const Tensor& b, double beta, Tensor& c) {
  require_rank2(a, "gemm");
  require_rank2(b, "gemm");
  require_rank2(c, "gemm");
  const std::size_t m = trans_a ? a.extent(1) : a.extent(0);
  const std::size_t k = trans_a ? a.extent(0) : a.extent(1);
  const std::size_t kb = trans_b ? b.extent(1) : b.extent(0);
  const std::size_t n = trans_b ? b.extent(0) : b.extent(1);
  if (k != kb || c.extent(0) != m || c.extent(1) != n) {
    throw ShapeError("gemm: shape mismatch");
  }
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), alpha, a.data(),
              static_cast<int>(a.extent(1)), b.data(),
              static_cast<int>(b.extent(1)), beta, c.data(),
              static_cast<int>(n));
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] += pb[i];
  return c;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "subtract");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] -= pb[i];
  return c;
}

Tensor multiply(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "multiply");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] *= pb[i];
  return c;
}

Tensor relu(const Tensor& a) {
  Tensor c = a;
  for (double& v : c.values()) v = v > 0.0 ? v : 0.0;
  return c;
}

Tensor exp(const Tensor& a) {
  Tensor c = a;
  for (double& v : c.values()) v = std::exp(v);
  if (!c.all_finite()) throw NumericalError("exp: overflow to non-finite value");
  return c;
}

Tensor log(const Tensor& a) {
  Tensor c = a;
  for (double& v : c.values()) {
    if (v <= 0.0) throw DomainError("log: non-positive input");
    v = std::log(v);
  }
  return c;
}

Tensor square(const Tensor& a) {
  Tensor c = a;
  for (double& v : c.values()) v *= v;
  return c;
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return Tensor::scalar(s);
}

Tensor mean(const Tensor& a) {
  return Tensor::scalar(sum(a).item() / static_cast<double>(a.size()));
}

Tensor concat_last(const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank() || a.rank() == 0) {
    throw ShapeError("concat_last: operands must share a positive rank");
  }
  for (std::size_t i = 0; i + 1 < a.rank(); ++i) {
    if (a.extent(i) != b.extent(i)) {
      throw ShapeError("concat_last: leading extents disagree");
    }
  }
  const std::size_t la = a.cols(), lb = b.cols();
  const std::size_t lead = a.size() / la;
  std::vector<std::size_t> shape = a.shape();
  shape.back() = la + lb;
  Tensor c(shape);
  for (std::size_t r = 0; r < lead; ++r) {
    double* out = c.data() + r * (la + lb);
    const double* pa = a.data() + r * la;
    const double* pb = b.data() + r * lb;
    for (std::size_t i = 0; i < la; ++i) out[i] = pa[i];
    for (std::size_t i = 0; i < lb; ++i) out[la + i] = pb[i];
  }
  return c;
}

Tensor slice_last(const Tensor& a, std::size_t offset, std::size_t count) {
  if (a.rank() == 0) throw ShapeError("slice_last: rank-0 tensor");
  const std::size_t la = a.cols();
  if (count == 0 || offset + count > la) {
    throw ShapeError("slice_last: range out of bounds");
  }
  const std::size_t lead = a.size() / la;
  std::vector<std::size_t> shape = a.shape();
  shape.back() = count;
  Tensor c(shape);
  for (std::size_t r = 0; r < lead; ++r) {
    const double* pa = a.data() + r * la + offset;
    double* out = c.data() + r * count;
    for (std::size_t i = 0; i < count; ++i) out[i] = pa[i];
  }
  return c;
}

Tensor broadcast_add_bias(const Tensor& x, const Tensor& bias) {
  require_rank2(x, "broadcast_add_bias");
  if (bias.rank() != 1 || bias.extent(0) != x.extent(1)) {
    throw ShapeError("broadcast_add_bias: bias must be rank-1 of width " +
                     std::to_string(x.extent(1)) + ", got " +
                     shape_string(bias));
  }
  Tensor c = x;
  const std::size_t n = x.extent(1);
  for (std::size_t r = 0; r < x.extent(0); ++r) {
    double* row = c.data() + r * n;
    const double* pb = bias.data();
    for (std::size_t i = 0; i < n; ++i) row[i] += pb[i];
  }
  return c;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (double& v : out.values()) v *= c;
  return out;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  Tensor out = a;
  for (double& v : out.values()) v = v < lo ? lo : (v > hi ? hi : v);
  return out;
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  require_same_shape(x, y, "axpy");
  const double* px = x.data();
  double* py = y.data();
  for (std::size_t i = 0; i < y.size(); ++i) py[i] += alpha * px[i];
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  require_rank2(a, "gather_rows");
  const std::size_t n = a.extent(1);
  Tensor out({rows.size(), n});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= a.extent(0)) throw ShapeError("gather_rows: row index out of range");
    const double* src = a.data() + rows[r] * n;
    double* dst = out.data() + r * n;
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
  }
  return out;
}

}  // namespace ops

}  // namespace xmvae
