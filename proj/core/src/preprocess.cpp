#include "xmvae/preprocess.hpp"

#include "xmvae/error.hpp"

namespace xmvae {

MatrixDataset preprocess(const std::vector<PoseSample>& samples,
                         const PreprocessOptions& options) {
  if (samples.empty()) throw InvalidArgument("preprocess: empty dataset");

  const std::size_t n = samples.size();
  MatrixDataset out;
  out.count = n;
  out.labeled.resize(n);

  NormalizeFlags flags;
  flags.translation = options.translation;
  flags.scale = options.scale;
  flags.mirror = options.handedness == HandednessMode::kMirror;

  Tensor m2({n, 2 * kHandJoints});
  Tensor m3({n, 3 * kHandJoints});
  Tensor hand({n, 1});

  for (std::size_t i = 0; i < n; ++i) {
    const PoseSample& s = samples[i];
    out.labeled[i] = s.labeled;
    hand(i, 0) = s.handedness == Handedness::kLeft ? -1.0 : 1.0;

    Joints2 j2 = s.joints2d;
    Joints3 j3 = s.joints3d;
    if (options.wrist_to_palm) {
      j2 = wrist_to_palm(j2);
      j3 = wrist_to_palm(j3);
    }
    const Joints2 n2 = normalize_pose(j2, flags, s.handedness).joints;
    const Joints3 n3 = normalize_pose(j3, flags, s.handedness).joints;
    for (std::size_t k = 0; k < kHandJoints; ++k) {
      m2(i, 2 * k) = n2[k].x;
      m2(i, 2 * k + 1) = n2[k].y;
      m3(i, 3 * k) = n3[k].x;
      m3(i, 3 * k + 1) = n3[k].y;
      m3(i, 3 * k + 2) = n3[k].z;
    }
  }

  out.features.emplace("2d", std::move(m2));
  out.features.emplace("3d", std::move(m3));
  if (options.handedness == HandednessMode::kFlag) out.handedness = std::move(hand);
  return out;
}

std::optional<Tensor> gather_handedness(const MatrixDataset& data,
                                        std::span<const std::size_t> rows) {
  if (!data.handedness.has_value()) return std::nullopt;
  return ops::gather_rows(*data.handedness, rows);
}

}  // namespace xmvae
