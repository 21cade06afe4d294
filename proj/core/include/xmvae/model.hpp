#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmvae/autodiff.hpp"
#include "xmvae/optimizer.hpp"
#include "xmvae/vae.hpp"

namespace xmvae {

inline constexpr std::size_t kJointCount = 21;

/// A named data representation of a hand pose and its flattened width.
struct ModalitySpec {
  std::string name;
  std::size_t flat_dim = 0;
  bool handedness_flag = false;

  static ModalitySpec keypoints2d(bool handedness_flag = false) {
    return {"2d", kJointCount * 2, handedness_flag};
  }
  static ModalitySpec keypoints3d(bool handedness_flag = false) {
    return {"3d", kJointCount * 3, handedness_flag};
  }
  static ModalitySpec named(const std::string& name, bool handedness_flag = false);
};

struct LatentConfig {
  std::size_t latent_dim = 32;
};

/// Hidden-layer widths of the keypoint MLPs. The production architecture is
/// five layers of 512; tests shrink this.
struct MlpShape {
  std::vector<std::size_t> hidden = {512, 512, 512, 512, 512};
};

/// MLP encoder mapping a flattened keypoint batch (plus an optional
/// handedness feature valued +-1) to Gaussian posterior parameters. The
/// log-variance head is clamped to [kLogVarMin, kLogVarMax].
class KeypointEncoder {
 public:
  KeypointEncoder(ModalitySpec spec, LatentConfig latent, MlpShape shape = {});

  /// Training path: records onto the tape and watches the parameters.
  GaussianParamsVar encode(Tape& tape, const Tensor& x,
                           const std::optional<Tensor>& handedness);

  /// Evaluation path: same arithmetic, no tape. Re-entrant.
  GaussianParams encode_mean(const Tensor& x,
                             const std::optional<Tensor>& handedness) const;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  const ModalitySpec& spec() const { return spec_; }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t input_dim() const { return spec_.flat_dim + (spec_.handedness_flag ? 1 : 0); }
  const std::vector<std::size_t>& hidden_sizes() const { return hidden_; }

  std::size_t scalar_parameter_count() const;

 private:
  Tensor assemble_input(const Tensor& x,
                        const std::optional<Tensor>& handedness) const;

  ModalitySpec spec_;
  std::size_t latent_dim_;
  std::vector<std::size_t> hidden_;
  std::vector<Parameter> params_;
};

/// MLP decoder mapping latent vectors back to a flattened keypoint batch.
class KeypointDecoder {
 public:
  KeypointDecoder(ModalitySpec spec, LatentConfig latent, MlpShape shape = {});

  Tape::Ref decode(Tape& tape, Tape::Ref z);
  Tensor decode_nograd(const Tensor& z) const;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  const ModalitySpec& spec() const { return spec_; }
  std::size_t latent_dim() const { return latent_dim_; }
  const std::vector<std::size_t>& hidden_sizes() const { return hidden_; }

  std::size_t scalar_parameter_count() const;

 private:
  ModalitySpec spec_;
  std::size_t latent_dim_;
  std::vector<std::size_t> hidden_;
  std::vector<Parameter> params_;
};

/// Glorot-uniform weights, zero biases; the mu/log_var head weights are
/// scaled by 0.01 so a fresh encoder starts near the prior.
void init_weights(KeypointEncoder& enc, std::uint64_t seed);
void init_weights(KeypointDecoder& dec, std::uint64_t seed);

/// Upper bound on the decoder's Lipschitz constant: the product of the
/// Frobenius norms of its weight matrices (ReLU is 1-Lipschitz).
double lipschitz_upper_bound(const KeypointDecoder& dec);

/// Deterministic mean-path prediction: encode_mean then decode the mean.
Tensor predict_mean(const KeypointEncoder& enc, const KeypointDecoder& dec,
                    const Tensor& x, const std::optional<Tensor>& handedness);

/// The shared encoder/decoder instances of one training run, keyed by
/// modality name.
struct ModelSet {
  LatentConfig latent;
  std::map<std::string, KeypointEncoder> encoders;
  std::map<std::string, KeypointDecoder> decoders;

  KeypointEncoder& encoder(const std::string& modality);
  const KeypointEncoder& encoder(const std::string& modality) const;
  KeypointDecoder& decoder(const std::string& modality);
  const KeypointDecoder& decoder(const std::string& modality) const;

  /// All parameters in a stable order (encoders then decoders, each sorted
  /// by modality name).
  std::vector<Parameter*> all_parameters();
  std::vector<const Parameter*> all_parameters() const;

  void init(std::uint64_t seed);
};

}  // namespace xmvae
