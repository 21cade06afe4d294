#pragma once

#include <cstdint>
#include <vector>

#include "xmvae/optimizer.hpp"
#include "xmvae/tensor.hpp"

namespace xmvae {

enum class OpKind {
  kConstant,
  kParam,
  kMatmul,
  kAdd,
  kSubtract,
  kMultiply,
  kRelu,
  kExp,
  kLog,
  kSquare,
  kSum,
  kMean,
  kConcatLast,
  kSliceLast,
  kBroadcastAddBias,
};

/// Reverse-mode gradient tape. Each primitive records one node; backward()
/// replays the nodes in exact reverse execution order, accumulating
/// gradients additively, and deposits parameter gradients into the watched
/// Parameter objects. A tape is single-use: backward() consumes it.
class Tape {
 public:
  using Ref = std::int32_t;

  Ref constant(Tensor value);
  Ref watch(Parameter& p);

  Ref matmul(Ref a, Ref b);
  Ref add(Ref a, Ref b);
  Ref subtract(Ref a, Ref b);
  Ref multiply(Ref a, Ref b);
  Ref relu(Ref a);
  Ref exp(Ref a);
  Ref log(Ref a);
  Ref square(Ref a);
  Ref sum(Ref a);
  Ref mean(Ref a);
  Ref concat_last(Ref a, Ref b);
  Ref slice_last(Ref a, std::size_t offset, std::size_t count);
  Ref broadcast_add_bias(Ref x, Ref bias);

  // Conveniences composed from the primitives above.
  Ref scale(Ref a, double c);
  Ref add_scalar(Ref a, double c);
  Ref affine(Ref x, Ref weight, Ref bias);
  Ref clamp(Ref a, double lo, double hi);

  const Tensor& value(Ref r) const { return nodes_[r].value; }
  std::size_t node_count() const { return nodes_.size(); }

  /// Backpropagates from a scalar loss node. Throws ShapeError if the loss
  /// is not a single element and NumericalError if the tape was already
  /// consumed by a previous backward pass.
  void backward(Ref loss);

  /// Gradient accumulated at a node by the last backward pass. Exposed for
  /// testing; parameter gradients land in the Parameter objects themselves.
  const Tensor& gradient(Ref r) const { return nodes_[r].grad; }

  bool consumed() const { return consumed_; }

 private:
  struct Node {
    OpKind op;
    Ref a = -1;
    Ref b = -1;
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    std::size_t aux0 = 0;
    std::size_t aux1 = 0;
  };

  Ref push(Node node);
  Ref unary(OpKind op, Ref a, Tensor value);
  Ref binary(OpKind op, Ref a, Ref b, Tensor value);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace xmvae
