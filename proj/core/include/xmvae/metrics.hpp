#pragma once

#include <span>
#include <string>
#include <vector>

#include "xmvae/tensor.hpp"

namespace xmvae {

/// Per-frame per-joint Euclidean distances between predicted and
/// ground-truth 3D joints, [frames x 21].
struct JointErrors {
  Tensor distances;

  std::size_t frames() const { return distances.extent(0); }
  std::size_t joints() const { return distances.extent(1); }
};

/// pred and gt are [frames x 63] flattened joint-major.
JointErrors joint_errors(const Tensor& pred, const Tensor& gt);

double mean_epe(const JointErrors& e);

/// Median over all entries; for an even count, the average of the two
/// central order statistics.
double median_epe(const JointErrors& e);

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

/// Fraction of all (frame, joint) entries with error <= d, per threshold.
Curve pck(const JointErrors& e, std::span<const double> thresholds);

/// Fraction of frames whose maximum joint error is <= d, per threshold.
Curve pcf(const JointErrors& e, std::span<const double> thresholds);

/// Two-column CSV: threshold,value.
void write_curve_csv(const std::string& path, const Curve& curve);

}  // namespace xmvae
