#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "xmvae/tensor.hpp"

namespace xmvae {

/// A named trainable tensor together with its accumulated gradient and ADAM
/// moment estimates. value, grad, m and v always share one shape.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
  std::int64_t step_count = 0;

  Parameter() = default;
  Parameter(std::string n, Tensor initial)
      : name(std::move(n)),
        value(std::move(initial)),
        grad(Tensor::zeros_like(value)),
        m(Tensor::zeros_like(value)),
        v(Tensor::zeros_like(value)) {}

  void zero_grad() {
    for (double& g : grad.values()) g = 0.0;
  }
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected ADAM update over the given parameters. Consumes the
/// accumulated gradients: each parameter's grad is zeroed and its step
/// counter incremented. No-op on an empty set.
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

}  // namespace xmvae
