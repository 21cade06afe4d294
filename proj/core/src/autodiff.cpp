#include "xmvae/autodiff.hpp"

#include <cmath>

#include "xmvae/error.hpp"

namespace xmvae {

Tape::Ref Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<Ref>(nodes_.size() - 1);
}

Tape::Ref Tape::unary(OpKind op, Ref a, Tensor value) {
  Node n;
  n.op = op;
  n.a = a;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Ref Tape::binary(OpKind op, Ref a, Ref b, Tensor value) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Ref Tape::constant(Tensor value) {
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Ref Tape::watch(Parameter& p) {
  Node n;
  n.op = OpKind::kParam;
  n.value = p.value;
  n.param = &p;
  return push(std::move(n));
}

Tape::Ref Tape::matmul(Ref a, Ref b) {
  return binary(OpKind::kMatmul, a, b, ops::matmul(value(a), value(b)));
}
Tape::Ref Tape::add(Ref a, Ref b) {
  return binary(OpKind::kAdd, a, b, ops::add(value(a), value(b)));
}
Tape::Ref Tape::subtract(Ref a, Ref b) {
  return binary(OpKind::kSubtract, a, b, ops::subtract(value(a), value(b)));
}
Tape::Ref Tape::multiply(Ref a, Ref b) {
  return binary(OpKind::kMultiply, a, b, ops::multiply(value(a), value(b)));
}
Tape::Ref Tape::relu(Ref a) { return unary(OpKind::kRelu, a, ops::relu(value(a))); }
Tape::Ref Tape::exp(Ref a) { return unary(OpKind::kExp, a, ops::exp(value(a))); }
Tape::Ref Tape::log(Ref a) { return unary(OpKind::kLog, a, ops::log(value(a))); }
Tape::Ref Tape::square(Ref a) {
  return unary(OpKind::kSquare, a, ops::square(value(a)));
}
Tape::Ref Tape::sum(Ref a) { return unary(OpKind::kSum, a, ops::sum(value(a))); }
Tape::Ref Tape::mean(Ref a) { return unary(OpKind::kMean, a, ops::mean(value(a))); }

Tape::Ref Tape::concat_last(Ref a, Ref b) {
  Ref r = binary(OpKind::kConcatLast, a, b, ops::concat_last(value(a), value(b)));
  nodes_[r].aux0 = value(a).cols();
  return r;
}

Tape::Ref Tape::slice_last(Ref a, std::size_t offset, std::size_t count) {
  Ref r = unary(OpKind::kSliceLast, a, ops::slice_last(value(a), offset, count));
  nodes_[r].aux0 = offset;
  nodes_[r].aux1 = count;
  return r;
}

Tape::Ref Tape::broadcast_add_bias(Ref x, Ref bias) {
  return binary(OpKind::kBroadcastAddBias, x, bias,
                ops::broadcast_add_bias(value(x), value(bias)));
}

Tape::Ref Tape::scale(Ref a, double c) {
  return multiply(a, constant(Tensor::full(value(a).shape(), c)));
}

Tape::Ref Tape::add_scalar(Ref a, double c) {
  return add(a, constant(Tensor::full(value(a).shape(), c)));
}

Tape::Ref Tape::affine(Ref x, Ref weight, Ref bias) {
  return broadcast_add_bias(matmul(x, weight), bias);
}

Tape::Ref Tape::clamp(Ref a, double lo, double hi) {
  // lo + relu(x - lo) - relu(x - hi); identity inside [lo, hi].
  Ref low = relu(add_scalar(a, -lo));
  Ref high = relu(add_scalar(a, -hi));
  return add_scalar(subtract(low, high), lo);
}

void Tape::backward(Ref loss) {
  if (consumed_) throw NumericalError("backward: tape already consumed");
  if (loss < 0 || static_cast<std::size_t>(loss) >= nodes_.size()) {
    throw ShapeError("backward: loss ref out of range");
  }
  if (nodes_[loss].value.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got " +
                     shape_string(nodes_[loss].value));
  }
  consumed_ = true;

  for (Node& n : nodes_) n.grad = Tensor::zeros_like(n.value);
  nodes_[loss].grad[0] = 1.0;

  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[static_cast<Ref>(i)];
    const Tensor& g = n.grad;
    switch (n.op) {
      case OpKind::kConstant:
        break;
      case OpKind::kParam:
        ops::axpy(1.0, g, n.param->grad);
        break;
      case OpKind::kMatmul: {
        Node& a = nodes_[n.a];
        Node& b = nodes_[n.b];
        // dA += G * B^T, dB += A^T * G
        ops::gemm_acc(false, true, 1.0, g, b.value, 1.0, a.grad);
        ops::gemm_acc(true, false, 1.0, a.value, g, 1.0, b.grad);
        break;
      }
      case OpKind::kAdd:
        ops::axpy(1.0, g, nodes_[n.a].grad);
        ops::axpy(1.0, g, nodes_[n.b].grad);
        break;
      case OpKind::kSubtract:
        ops::axpy(1.0, g, nodes_[n.a].grad);
        ops::axpy(-1.0, g, nodes_[n.b].grad);
        break;
      case OpKind::kMultiply: {
        Node& a = nodes_[n.a];
        Node& b = nodes_[n.b];
        double* da = a.grad.data();
        double* db = b.grad.data();
        const double* pg = g.data();
        const double* pa = a.value.data();
        const double* pb = b.value.data();
        for (std::size_t k = 0; k < g.size(); ++k) {
          da[k] += pg[k] * pb[k];
          db[k] += pg[k] * pa[k];
        }
        break;
      }
      case OpKind::kRelu: {
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double* pa = a.value.data();
        const double* pg = g.data();
        for (std::size_t k = 0; k < g.size(); ++k) {
          if (pa[k] > 0.0) da[k] += pg[k];
        }
        break;
      }
      case OpKind::kExp: {
        // d exp(x) = exp(x), reuse the stored output.
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double* out = n.value.data();
        const double* pg = g.data();
        for (std::size_t k = 0; k < g.size(); ++k) da[k] += pg[k] * out[k];
        break;
      }
      case OpKind::kLog: {
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double* pa = a.value.data();
        const double* pg = g.data();
        for (std::size_t k = 0; k < g.size(); ++k) da[k] += pg[k] / pa[k];
        break;
      }
      case OpKind::kSquare: {
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double* pa = a.value.data();
        const double* pg = g.data();
        for (std::size_t k = 0; k < g.size(); ++k) da[k] += 2.0 * pa[k] * pg[k];
        break;
      }
      case OpKind::kSum: {
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double gv = g[0];
        for (std::size_t k = 0; k < a.grad.size(); ++k) da[k] += gv;
        break;
      }
      case OpKind::kMean: {
        Node& a = nodes_[n.a];
        double* da = a.grad.data();
        const double gv = g[0] / static_cast<double>(a.value.size());
        for (std::size_t k = 0; k < a.grad.size(); ++k) da[k] += gv;
        break;
      }
      case OpKind::kConcatLast: {
        Node& a = nodes_[n.a];
        Node& b = nodes_[n.b];
        const std::size_t la = n.aux0;
        const std::size_t lb = n.value.cols() - la;
        const std::size_t lead = n.value.size() / n.value.cols();
        for (std::size_t r = 0; r < lead; ++r) {
          const double* pg = g.data() + r * (la + lb);
          double* da = a.grad.data() + r * la;
          double* db = b.grad.data() + r * lb;
          for (std::size_t k = 0; k < la; ++k) da[k] += pg[k];
          for (std::size_t k = 0; k < lb; ++k) db[k] += pg[la + k];
        }
        break;
      }
      case OpKind::kSliceLast: {
        Node& a = nodes_[n.a];
        const std::size_t offset = n.aux0;
        const std::size_t count = n.aux1;
        const std::size_t cols = a.value.cols();
        const std::size_t lead = a.value.size() / cols;
        for (std::size_t r = 0; r < lead; ++r) {
          double* da = a.grad.data() + r * cols + offset;
          const double* pg = g.data() + r * count;
          for (std::size_t k = 0; k < count; ++k) da[k] += pg[k];
        }
        break;
      }
      case OpKind::kBroadcastAddBias: {
        Node& x = nodes_[n.a];
        Node& bias = nodes_[n.b];
        ops::axpy(1.0, g, x.grad);
        const std::size_t cols = g.cols();
        const std::size_t rows = g.size() / cols;
        double* db = bias.grad.data();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* pg = g.data() + r * cols;
          for (std::size_t k = 0; k < cols; ++k) db[k] += pg[k];
        }
        break;
      }
    }
  }
}

}  // namespace xmvae
