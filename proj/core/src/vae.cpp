#include "xmvae/vae.hpp"

#include <cmath>

#include "xmvae/error.hpp"

namespace xmvae {

LatentSampleVar reparameterize(Tape& tape, const GaussianParamsVar& g,
                               Tensor noise) {
  if (!noise.same_shape(tape.value(g.mu))) {
    throw ShapeError("reparameterize: noise shape must match mu");
  }
  Tape::Ref sigma = tape.exp(tape.scale(g.log_var, 0.5));
  Tape::Ref eps = tape.constant(noise);
  Tape::Ref z = tape.add(g.mu, tape.multiply(sigma, eps));
  return {z, std::move(noise)};
}

LatentSampleVar reparameterize(Tape& tape, const GaussianParamsVar& g, Rng& rng) {
  Tensor noise(tape.value(g.mu).shape());
  for (double& v : noise.values()) v = rng.normal();
  return reparameterize(tape, g, std::move(noise));
}

Tape::Ref kl_standard_normal(Tape& tape, const GaussianParamsVar& g) {
  const Tensor& mu = tape.value(g.mu);
  const double batch = static_cast<double>(mu.rows());
  Tape::Ref ones = tape.constant(Tensor::full(mu.shape(), 1.0));
  Tape::Ref term = tape.subtract(
      tape.subtract(tape.add(ones, g.log_var), tape.square(g.mu)),
      tape.exp(g.log_var));
  return tape.scale(tape.sum(term), -0.5 / batch);
}

double kl_standard_normal(const GaussianParams& g) {
  const double batch = static_cast<double>(g.mu.rows());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.mu.size(); ++i) {
    const double mu = g.mu[i];
    const double lv = g.log_var[i];
    acc += 1.0 + lv - mu * mu - std::exp(lv);
  }
  return -0.5 * acc / batch;
}

Tape::Ref reconstruction_loss(Tape& tape, Tape::Ref target, Tape::Ref decoded,
                              ReconMode mode) {
  const Tensor& t = tape.value(target);
  if (!t.same_shape(tape.value(decoded))) {
    throw ShapeError("reconstruction_loss: target/decoded shape mismatch");
  }
  const double batch = static_cast<double>(t.rows());
  Tape::Ref sq = tape.square(tape.subtract(decoded, target));
  if (mode == ReconMode::kSquaredSum) {
    return tape.scale(tape.sum(sq), 1.0 / batch);
  }
  // Euclidean: per-sample sqrt of the squared sum, via exp(0.5*log(. + eps)).
  // The epsilon keeps the log finite (and the norm differentiable) at an
  // exact reconstruction.
  constexpr double kEps = 1e-12;
  Tape::Ref ones_col = tape.constant(Tensor::full({t.cols(), 1}, 1.0));
  Tape::Ref row_sums = tape.matmul(sq, ones_col);  // [batch x 1]
  Tape::Ref norms =
      tape.exp(tape.scale(tape.log(tape.add_scalar(row_sums, kEps)), 0.5));
  return tape.scale(tape.sum(norms), 1.0 / batch);
}

ElboResult elbo_loss(Tape& tape, const EncodeFn& encode, const DecodeFn& decode,
                     const Tensor& x_target, NoiseSource noise,
                     const ElboOptions& options) {
  GaussianParamsVar g = encode(tape);
  const Tensor& mu = tape.value(g.mu);

  const int k = options.samples_per_step;
  if (k < 1) throw InvalidArgument("elbo_loss: samples_per_step must be >= 1");

  Tape::Ref target = tape.constant(x_target);
  Tape::Ref recon = -1;
  for (int s = 0; s < k; ++s) {
    Tensor eps;
    if (noise.rng != nullptr) {
      eps = Tensor(mu.shape());
      for (double& v : eps.values()) v = noise.rng->normal();
    } else if (noise.fixed != nullptr) {
      if (static_cast<std::size_t>(s) >= noise.fixed->size()) {
        throw InvalidArgument("elbo_loss: not enough fixed noise draws");
      }
      eps = (*noise.fixed)[s];
    } else {
      eps = Tensor(mu.shape());  // zeros: mean path
    }
    LatentSampleVar zs = reparameterize(tape, g, std::move(eps));
    Tape::Ref decoded = decode(tape, zs.z);
    Tape::Ref term = reconstruction_loss(tape, target, decoded, options.recon);
    recon = (recon < 0) ? term : tape.add(recon, term);
  }
  if (k > 1) recon = tape.scale(recon, 1.0 / static_cast<double>(k));

  Tape::Ref kl = kl_standard_normal(tape, g);
  Tape::Ref total = options.kl_weight == 1.0
                        ? tape.add(recon, kl)
                        : tape.add(recon, tape.scale(kl, options.kl_weight));

  ElboResult result;
  result.reconstruction = recon;
  result.kl = kl;
  result.total = total;
  result.losses.reconstruction = tape.value(recon).item();
  result.losses.kl = tape.value(kl).item();
  result.losses.total = tape.value(total).item();
  return result;
}

}  // namespace xmvae
