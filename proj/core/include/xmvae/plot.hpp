#pragma once

#include <string>
#include <vector>

#include "xmvae/kinematics.hpp"
#include "xmvae/tensor.hpp"

namespace xmvae {

/// Renders a sequence of decoded 2D hands (each a [1 x 42] row) as a
/// self-contained SVG strip: joints as dots, bones as lines, one panel per
/// step.
void write_hand_strip_svg(const std::string& path,
                          const std::vector<Tensor>& hands2d);

}  // namespace xmvae
