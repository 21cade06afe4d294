#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmvae/model.hpp"
#include "xmvae/preprocess.hpp"

namespace xmvae {

enum class WalkMode {
  kLinear,     // z(l) = (1-l)*z1 + l*z2
  kSpherical,  // great-circle interpolation between z1 and z2
};

struct WalkStep {
  double lambda = 0.0;
  Tensor z;                                // [1 x latent]
  std::map<std::string, Tensor> decoded;   // modality -> [1 x flat_dim]
};

struct WalkResult {
  std::vector<WalkStep> steps;
};

/// Embeds x1 and x2 at their posterior means and decodes n equally spaced
/// points of the segment between them (endpoints included) with every
/// given decoder. x1/x2 are [1 x flat_dim] rows.
WalkResult interpolate(const KeypointEncoder& enc,
                       const std::vector<const KeypointDecoder*>& decoders,
                       const Tensor& x1, const Tensor& x2,
                       const std::optional<Tensor>& hand1,
                       const std::optional<Tensor>& hand2, std::size_t steps,
                       WalkMode mode = WalkMode::kLinear);

/// Varies one latent coordinate over the given values while the others stay
/// at the posterior mean of x.
WalkResult axis_sweep(const KeypointEncoder& enc,
                      const std::vector<const KeypointDecoder*>& decoders,
                      const Tensor& x, const std::optional<Tensor>& hand,
                      std::size_t axis, std::span<const double> values);

/// k reparameterized posterior draws for x, each decoded.
std::vector<Tensor> sample_posterior(const KeypointEncoder& enc,
                                     const KeypointDecoder& dec, const Tensor& x,
                                     const std::optional<Tensor>& hand,
                                     std::size_t k, Rng& rng);

/// CSV of posterior means, one line per (sample, modality):
/// modality,index,mu_0,...  Suitable for external dimensionality reduction.
void export_embeddings(
    const std::vector<std::pair<std::string, const KeypointEncoder*>>& encoders,
    const MatrixDataset& data, std::size_t max_samples, const std::string& path);

/// CSV of a walk: lambda column, then one column per decoded coordinate of
/// each modality in name order.
void write_walk_csv(const std::string& path, const WalkResult& walk);

}  // namespace xmvae
