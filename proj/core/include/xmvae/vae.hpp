#pragma once

#include <functional>
#include <optional>

#include "xmvae/autodiff.hpp"
#include "xmvae/rng.hpp"
#include "xmvae/tensor.hpp"

namespace xmvae {

// Gaussian posterior parameters emitted by an encoder. Encoders clamp
// log_var to [-30, 30] so the variance is always strictly positive and
// finite.
inline constexpr double kLogVarMin = -30.0;
inline constexpr double kLogVarMax = 30.0;

/// Plain-tensor posterior parameters (evaluation path).
struct GaussianParams {
  Tensor mu;       // [batch x latent]
  Tensor log_var;  // [batch x latent]
};

/// Posterior parameters as live tape nodes (training path).
struct GaussianParamsVar {
  Tape::Ref mu;
  Tape::Ref log_var;
};

/// A reparameterized draw together with the noise that produced it:
/// z = mu + exp(0.5 * log_var) * noise, elementwise.
struct LatentSampleVar {
  Tape::Ref z;
  Tensor noise;
};

struct LossBreakdown {
  double reconstruction = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

enum class ReconMode {
  kSquaredSum,  // per-sample sum of squared errors, averaged over the batch
  kEuclidean,   // per-sample Euclidean norm, averaged over the batch
};

/// z = mu + sigma * eps with a caller-supplied eps draw. Gradients flow
/// through mu and log_var only; eps enters as a constant.
LatentSampleVar reparameterize(Tape& tape, const GaussianParamsVar& g,
                               Tensor noise);

/// Same, drawing eps ~ N(0, I) from the given stream.
LatentSampleVar reparameterize(Tape& tape, const GaussianParamsVar& g, Rng& rng);

/// Sum over latent dimensions of -0.5 * (1 + log_var - mu^2 - exp(log_var)),
/// averaged over the batch. Non-negative for all finite inputs.
Tape::Ref kl_standard_normal(Tape& tape, const GaussianParamsVar& g);

/// Closed form of the same quantity on plain tensors.
double kl_standard_normal(const GaussianParams& g);

/// Reconstruction objective between a target constant and a decoded batch.
Tape::Ref reconstruction_loss(Tape& tape, Tape::Ref target, Tape::Ref decoded,
                              ReconMode mode);

// Encoder/decoder hooks for elbo_loss. The encoder closure is already bound
// to its input batch; the decoder maps a latent node to a decoded node.
using EncodeFn = std::function<GaussianParamsVar(Tape&)>;
using DecodeFn = std::function<Tape::Ref(Tape&, Tape::Ref)>;

/// Where the eps draws for elbo_loss come from. Exactly one source is
/// active; fixed tensors are consumed in order (tests, finite differences).
struct NoiseSource {
  Rng* rng = nullptr;
  const std::vector<Tensor>* fixed = nullptr;
  bool zeros = false;

  static NoiseSource from(Rng& r) { return {&r, nullptr, false}; }
  static NoiseSource fixed_draws(const std::vector<Tensor>& draws) {
    return {nullptr, &draws, false};
  }
  static NoiseSource mean_path() { return {nullptr, nullptr, true}; }
};

struct ElboOptions {
  double kl_weight = 1.0;
  int samples_per_step = 1;
  ReconMode recon = ReconMode::kSquaredSum;
};

struct ElboResult {
  LossBreakdown losses;
  Tape::Ref total;
  Tape::Ref reconstruction;
  Tape::Ref kl;
};

/// Composes encode -> reparameterize -> decode -> reconstruction + KL. With
/// samples_per_step > 1 the reconstruction term is averaged over that many
/// eps draws; the KL term is sample-free either way.
ElboResult elbo_loss(Tape& tape, const EncodeFn& encode, const DecodeFn& decode,
                     const Tensor& x_target, NoiseSource noise,
                     const ElboOptions& options = {});

}  // namespace xmvae
