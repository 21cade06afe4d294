#pragma once

#include <string>
#include <vector>

#include "xmvae/kinematics.hpp"

namespace xmvae {

// Dataset file: one JSON object per line with fields index, handedness
// ("L"/"R"), labeled, joints3d (63 reals), joints2d (42 reals) and angles
// (26 reals). Values are written with 17 significant digits so a read-back
// reproduces every double bit-for-bit. Readers reject records whose arrays
// have the wrong arity.

void write_dataset(const std::string& path,
                   const std::vector<PoseSample>& samples);

std::vector<PoseSample> read_dataset(const std::string& path);

/// printf("%.17g") formatting used by every text emitter in this project so
/// reruns are byte-identical.
std::string format_real(double v);

}  // namespace xmvae
