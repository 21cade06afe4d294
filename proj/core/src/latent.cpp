#include "xmvae/latent.hpp"

#include <cmath>
#include <fstream>

#include "xmvae/dataset.hpp"
#include "xmvae/error.hpp"

namespace xmvae {

namespace {

Tensor blend(const Tensor& z1, const Tensor& z2, double lambda, WalkMode mode) {
  Tensor z = Tensor::zeros_like(z1);
  if (mode == WalkMode::kLinear) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = (1.0 - lambda) * z1[i] + lambda * z2[i];
    }
    return z;
  }
  // Spherical: rotate within the plane spanned by z1, z2.
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    dot += z1[i] * z2[i];
    n1 += z1[i] * z1[i];
    n2 += z2[i] * z2[i];
  }
  n1 = std::sqrt(n1);
  n2 = std::sqrt(n2);
  if (n1 == 0.0 || n2 == 0.0) return blend(z1, z2, lambda, WalkMode::kLinear);
  double cosw = dot / (n1 * n2);
  cosw = cosw < -1.0 ? -1.0 : (cosw > 1.0 ? 1.0 : cosw);
  const double w = std::acos(cosw);
  if (std::sin(w) < 1e-12) return blend(z1, z2, lambda, WalkMode::kLinear);
  const double a = std::sin((1.0 - lambda) * w) / std::sin(w);
  const double b = std::sin(lambda * w) / std::sin(w);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * z1[i] + b * z2[i];
  return z;
}

WalkStep make_step(const std::vector<const KeypointDecoder*>& decoders,
                   double lambda, Tensor z) {
  WalkStep step;
  step.lambda = lambda;
  step.z = std::move(z);
  for (const KeypointDecoder* dec : decoders) {
    step.decoded.emplace(dec->spec().name, dec->decode_nograd(step.z));
  }
  return step;
}

}  // namespace

WalkResult interpolate(const KeypointEncoder& enc,
                       const std::vector<const KeypointDecoder*>& decoders,
                       const Tensor& x1, const Tensor& x2,
                       const std::optional<Tensor>& hand1,
                       const std::optional<Tensor>& hand2, std::size_t steps,
                       WalkMode mode) {
  if (steps < 2) throw InvalidArgument("interpolate: need at least 2 steps");
  const Tensor z1 = enc.encode_mean(x1, hand1).mu;
  const Tensor z2 = enc.encode_mean(x2, hand2).mu;

  WalkResult walk;
  walk.steps.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double lambda =
        static_cast<double>(s) / static_cast<double>(steps - 1);
    walk.steps.push_back(make_step(decoders, lambda, blend(z1, z2, lambda, mode)));
  }
  return walk;
}

WalkResult axis_sweep(const KeypointEncoder& enc,
                      const std::vector<const KeypointDecoder*>& decoders,
                      const Tensor& x, const std::optional<Tensor>& hand,
                      std::size_t axis, std::span<const double> values) {
  const Tensor mu = enc.encode_mean(x, hand).mu;
  if (axis >= mu.cols()) throw InvalidArgument("axis_sweep: axis out of range");
  WalkResult walk;
  walk.steps.reserve(values.size());
  for (double v : values) {
    Tensor z = mu;
    z[axis] = v;
    walk.steps.push_back(make_step(decoders, v, std::move(z)));
  }
  return walk;
}

std::vector<Tensor> sample_posterior(const KeypointEncoder& enc,
                                     const KeypointDecoder& dec, const Tensor& x,
                                     const std::optional<Tensor>& hand,
                                     std::size_t k, Rng& rng) {
  if (k == 0) throw InvalidArgument("sample_posterior: k must be >= 1");
  const GaussianParams g = enc.encode_mean(x, hand);
  std::vector<Tensor> out;
  out.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    Tensor z = Tensor::zeros_like(g.mu);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = g.mu[i] + std::exp(0.5 * g.log_var[i]) * rng.normal();
    }
    out.push_back(dec.decode_nograd(z));
  }
  return out;
}

void export_embeddings(
    const std::vector<std::pair<std::string, const KeypointEncoder*>>& encoders,
    const MatrixDataset& data, std::size_t max_samples, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open embedding file for writing: " + path);

  if (encoders.empty()) {
    out << "modality,index\n";
    return;
  }
  const std::size_t latent = encoders.front().second->latent_dim();
  out << "modality,index";
  for (std::size_t i = 0; i < latent; ++i) out << ",mu_" << i;
  out << '\n';

  const std::size_t count =
      max_samples == 0 ? data.count : std::min(max_samples, data.count);
  std::vector<std::size_t> rows(count);
  for (std::size_t i = 0; i < count; ++i) rows[i] = i;

  for (const auto& [modality, enc] : encoders) {
    const Tensor x = ops::gather_rows(data.features.at(modality), rows);
    const std::optional<Tensor> hand = gather_handedness(data, rows);
    const GaussianParams g = enc->encode_mean(x, hand);
    for (std::size_t r = 0; r < count; ++r) {
      out << modality << ',' << r;
      for (std::size_t i = 0; i < latent; ++i) {
        out << ',' << format_real(g.mu(r, i));
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("embedding write failed: " + path);
}

void write_walk_csv(const std::string& path, const WalkResult& walk) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open walk file for writing: " + path);
  out << "lambda";
  if (!walk.steps.empty()) {
    for (const auto& [modality, decoded] : walk.steps.front().decoded) {
      for (std::size_t i = 0; i < decoded.size(); ++i) {
        out << ',' << modality << '_' << i;
      }
    }
  }
  out << '\n';
  for (const WalkStep& step : walk.steps) {
    out << format_real(step.lambda);
    for (const auto& [modality, decoded] : step.decoded) {
      for (double v : decoded.values()) out << ',' << format_real(v);
    }
    out << '\n';
  }
  if (!out) throw IoError("walk write failed: " + path);
}

}  // namespace xmvae
