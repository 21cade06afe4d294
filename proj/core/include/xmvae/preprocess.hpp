#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmvae/kinematics.hpp"
#include "xmvae/tensor.hpp"

namespace xmvae {

enum class HandednessMode {
  kFlag,    // feed +-1 into the encoders, no mirroring
  kMirror,  // mirror left hands so all data is right-handed
  kNone,    // leave handedness alone and feed nothing
};

struct PreprocessOptions {
  bool translation = true;
  bool scale = true;
  HandednessMode handedness = HandednessMode::kFlag;
  bool wrist_to_palm = false;
};

/// Per-modality training matrices. Each modality is normalized
/// independently: 2D in image units, 3D in model units. Rows are flattened
/// joint-major (x, y[, z] per joint).
struct MatrixDataset {
  std::size_t count = 0;
  std::map<std::string, Tensor> features;  // "2d" -> [N x 42], "3d" -> [N x 63]
  std::optional<Tensor> handedness;        // [N x 1] of +-1 under kFlag
  std::vector<bool> labeled;
};

MatrixDataset preprocess(const std::vector<PoseSample>& samples,
                         const PreprocessOptions& options);

/// Handedness column for a row subset, when the mode provides one.
std::optional<Tensor> gather_handedness(const MatrixDataset& data,
                                        std::span<const std::size_t> rows);

}  // namespace xmvae
