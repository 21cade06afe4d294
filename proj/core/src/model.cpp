#include "xmvae/model.hpp"

#include <cmath>

#include "xmvae/error.hpp"
#include "xmvae/rng.hpp"

namespace xmvae {

namespace {

std::vector<Parameter> make_mlp_params(const std::string& prefix,
                                       std::size_t in_dim,
                                       const std::vector<std::size_t>& hidden,
                                       const std::vector<std::pair<std::string, std::size_t>>& outputs) {
  std::vector<Parameter> params;
  params.reserve(2 * (hidden.size() + outputs.size()));
  std::size_t prev = in_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string layer = prefix + "/h" + std::to_string(i);
    params.emplace_back(layer + "/W", Tensor({prev, hidden[i]}));
    params.emplace_back(layer + "/b", Tensor({hidden[i]}));
    prev = hidden[i];
  }
  for (const auto& [name, width] : outputs) {
    params.emplace_back(prefix + "/" + name + "/W", Tensor({prev, width}));
    params.emplace_back(prefix + "/" + name + "/b", Tensor({width}));
  }
  return params;
}

void glorot_fill(Tensor& w, Rng& rng, double scale) {
  const double fan_in = static_cast<double>(w.extent(0));
  const double fan_out = static_cast<double>(w.extent(1));
  const double a = std::sqrt(6.0 / (fan_in + fan_out)) * scale;
  for (double& v : w.values()) v = rng.uniform(-a, a);
}

std::size_t mlp_count(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                      const std::vector<std::size_t>& out_widths) {
  std::size_t count = 0;
  std::size_t prev = in_dim;
  for (std::size_t h : hidden) {
    count += prev * h + h;
    prev = h;
  }
  for (std::size_t w : out_widths) count += prev * w + w;
  return count;
}

}  // namespace

ModalitySpec ModalitySpec::named(const std::string& name, bool handedness_flag) {
  if (name == "2d") return keypoints2d(handedness_flag);
  if (name == "3d") return keypoints3d(handedness_flag);
  throw InvalidArgument("unknown modality name: " + name);
}

KeypointEncoder::KeypointEncoder(ModalitySpec spec, LatentConfig latent,
                                 MlpShape shape)
    : spec_(std::move(spec)),
      latent_dim_(latent.latent_dim),
      hidden_(std::move(shape.hidden)) {
  if (latent_dim_ == 0) throw InvalidArgument("latent_dim must be >= 1");
  params_ = make_mlp_params("enc_" + spec_.name, input_dim(), hidden_,
                            {{"mu", latent_dim_}, {"logvar", latent_dim_}});
}

Tensor KeypointEncoder::assemble_input(
    const Tensor& x, const std::optional<Tensor>& handedness) const {
  if (x.rank() != 2 || x.extent(1) != spec_.flat_dim) {
    throw ShapeError("encode: expected [batch x " +
                     std::to_string(spec_.flat_dim) + "] input for modality " +
                     spec_.name + ", got " + shape_string(x));
  }
  if (!spec_.handedness_flag) return x;
  if (!handedness.has_value()) {
    throw InvalidArgument("encode: modality " + spec_.name +
                          " requires a handedness flag per sample");
  }
  if (handedness->rank() != 2 || handedness->extent(0) != x.extent(0) ||
      handedness->extent(1) != 1) {
    throw ShapeError("encode: handedness must be [batch x 1]");
  }
  return ops::concat_last(x, *handedness);
}

GaussianParamsVar KeypointEncoder::encode(
    Tape& tape, const Tensor& x, const std::optional<Tensor>& handedness) {
  Tape::Ref h = tape.constant(assemble_input(x, handedness));
  std::size_t i = 0;
  for (std::size_t layer = 0; layer < hidden_.size(); ++layer) {
    Tape::Ref w = tape.watch(params_[i++]);
    Tape::Ref b = tape.watch(params_[i++]);
    h = tape.relu(tape.affine(h, w, b));
  }
  Tape::Ref mu = tape.affine(h, tape.watch(params_[i]), tape.watch(params_[i + 1]));
  Tape::Ref lv = tape.affine(h, tape.watch(params_[i + 2]), tape.watch(params_[i + 3]));
  return {mu, tape.clamp(lv, kLogVarMin, kLogVarMax)};
}

GaussianParams KeypointEncoder::encode_mean(
    const Tensor& x, const std::optional<Tensor>& handedness) const {
  Tensor h = assemble_input(x, handedness);
  std::size_t i = 0;
  for (std::size_t layer = 0; layer < hidden_.size(); ++layer) {
    h = ops::relu(ops::broadcast_add_bias(ops::matmul(h, params_[i].value),
                                          params_[i + 1].value));
    i += 2;
  }
  Tensor mu = ops::broadcast_add_bias(ops::matmul(h, params_[i].value),
                                      params_[i + 1].value);
  Tensor lv = ops::broadcast_add_bias(ops::matmul(h, params_[i + 2].value),
                                      params_[i + 3].value);
  return {std::move(mu), ops::clamp(lv, kLogVarMin, kLogVarMax)};
}

std::size_t KeypointEncoder::scalar_parameter_count() const {
  return mlp_count(input_dim(), hidden_, {latent_dim_, latent_dim_});
}

KeypointDecoder::KeypointDecoder(ModalitySpec spec, LatentConfig latent,
                                 MlpShape shape)
    : spec_(std::move(spec)),
      latent_dim_(latent.latent_dim),
      hidden_(std::move(shape.hidden)) {
  if (latent_dim_ == 0) throw InvalidArgument("latent_dim must be >= 1");
  params_ = make_mlp_params("dec_" + spec_.name, latent_dim_, hidden_,
                            {{"out", spec_.flat_dim}});
}

Tape::Ref KeypointDecoder::decode(Tape& tape, Tape::Ref z) {
  if (tape.value(z).rank() != 2 || tape.value(z).extent(1) != latent_dim_) {
    throw ShapeError("decode: expected [batch x " + std::to_string(latent_dim_) +
                     "] latent, got " + shape_string(tape.value(z)));
  }
  Tape::Ref h = z;
  std::size_t i = 0;
  for (std::size_t layer = 0; layer < hidden_.size(); ++layer) {
    Tape::Ref w = tape.watch(params_[i++]);
    Tape::Ref b = tape.watch(params_[i++]);
    h = tape.relu(tape.affine(h, w, b));
  }
  return tape.affine(h, tape.watch(params_[i]), tape.watch(params_[i + 1]));
}

Tensor KeypointDecoder::decode_nograd(const Tensor& z) const {
  if (z.rank() != 2 || z.extent(1) != latent_dim_) {
    throw ShapeError("decode: expected [batch x " + std::to_string(latent_dim_) +
                     "] latent, got " + shape_string(z));
  }
  Tensor h = z;
  std::size_t i = 0;
  for (std::size_t layer = 0; layer < hidden_.size(); ++layer) {
    h = ops::relu(ops::broadcast_add_bias(ops::matmul(h, params_[i].value),
                                          params_[i + 1].value));
    i += 2;
  }
  return ops::broadcast_add_bias(ops::matmul(h, params_[i].value),
                                 params_[i + 1].value);
}

std::size_t KeypointDecoder::scalar_parameter_count() const {
  return mlp_count(latent_dim_, hidden_, {spec_.flat_dim});
}

void init_weights(KeypointEncoder& enc, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, rng_tag::kInit));
  auto& params = enc.parameters();
  const std::size_t head_start = 2 * enc.hidden_sizes().size();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    const bool is_weight = p.value.rank() == 2;
    if (!is_weight) {
      for (double& v : p.value.values()) v = 0.0;
      continue;
    }
    const bool is_head = i >= head_start;
    glorot_fill(p.value, rng, is_head ? 0.01 : 1.0);
  }
}

void init_weights(KeypointDecoder& dec, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, rng_tag::kInit));
  for (Parameter& p : dec.parameters()) {
    if (p.value.rank() == 2) {
      glorot_fill(p.value, rng, 1.0);
    } else {
      for (double& v : p.value.values()) v = 0.0;
    }
  }
}

double lipschitz_upper_bound(const KeypointDecoder& dec) {
  double bound = 1.0;
  for (const Parameter& p : dec.parameters()) {
    if (p.value.rank() != 2) continue;
    double sq = 0.0;
    for (double v : p.value.values()) sq += v * v;
    bound *= std::sqrt(sq);
  }
  return bound;
}

Tensor predict_mean(const KeypointEncoder& enc, const KeypointDecoder& dec,
                    const Tensor& x, const std::optional<Tensor>& handedness) {
  return dec.decode_nograd(enc.encode_mean(x, handedness).mu);
}

KeypointEncoder& ModelSet::encoder(const std::string& modality) {
  auto it = encoders.find(modality);
  if (it == encoders.end()) throw InvalidArgument("no encoder for modality " + modality);
  return it->second;
}

const KeypointEncoder& ModelSet::encoder(const std::string& modality) const {
  auto it = encoders.find(modality);
  if (it == encoders.end()) throw InvalidArgument("no encoder for modality " + modality);
  return it->second;
}

KeypointDecoder& ModelSet::decoder(const std::string& modality) {
  auto it = decoders.find(modality);
  if (it == decoders.end()) throw InvalidArgument("no decoder for modality " + modality);
  return it->second;
}

const KeypointDecoder& ModelSet::decoder(const std::string& modality) const {
  auto it = decoders.find(modality);
  if (it == decoders.end()) throw InvalidArgument("no decoder for modality " + modality);
  return it->second;
}

std::vector<Parameter*> ModelSet::all_parameters() {
  std::vector<Parameter*> out;
  for (auto& [name, enc] : encoders) {
    for (Parameter& p : enc.parameters()) out.push_back(&p);
  }
  for (auto& [name, dec] : decoders) {
    for (Parameter& p : dec.parameters()) out.push_back(&p);
  }
  return out;
}

std::vector<const Parameter*> ModelSet::all_parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& [name, enc] : encoders) {
    for (const Parameter& p : enc.parameters()) out.push_back(&p);
  }
  for (const auto& [name, dec] : decoders) {
    for (const Parameter& p : dec.parameters()) out.push_back(&p);
  }
  return out;
}

void ModelSet::init(std::uint64_t seed) {
  std::uint64_t k = 0;
  for (auto& [name, enc] : encoders) init_weights(enc, Rng::derive(seed, rng_tag::kInit, k++));
  for (auto& [name, dec] : decoders) init_weights(dec, Rng::derive(seed, rng_tag::kInit, k++));
}

}  // namespace xmvae
