#pragma once

#include <map>
#include <string>

#include "xmvae/model.hpp"
#include "xmvae/tensor.hpp"

namespace xmvae {

// Weight checkpoint layout (little-endian, versioned by the magic):
//   "XMVAE1"
//   repeated until end of file:
//     u32   name length
//     bytes name
//     u32   rank
//     u64   extent, one per rank
//     f64   values, row-major
// Save/load of the same model set is bit-exact.

void save_checkpoint(const std::string& path, const ModelSet& models);

std::map<std::string, Tensor> read_checkpoint(const std::string& path);

/// Copies checkpoint tensors into an existing model set. Every model
/// parameter must be present with a matching shape.
void apply_checkpoint(const std::map<std::string, Tensor>& records,
                      ModelSet& models);

/// Rebuilds a ModelSet from checkpoint contents alone. Parameter names and
/// shapes determine the modalities, hidden widths, latent dimensionality
/// and whether encoders take a handedness feature.
ModelSet model_set_from_checkpoint(const std::map<std::string, Tensor>& records);

}  // namespace xmvae
