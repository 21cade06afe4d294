#include "xmvae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "xmvae/dataset.hpp"
#include "xmvae/error.hpp"

namespace xmvae {

namespace {
constexpr std::size_t kJoints = 21;
}

JointErrors joint_errors(const Tensor& pred, const Tensor& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("joint_errors: prediction/ground-truth shape mismatch");
  }
  if (pred.rank() != 2 || pred.extent(1) != 3 * kJoints) {
    throw ShapeError("joint_errors: expected [frames x 63] tensors, got " +
                     shape_string(pred));
  }
  const std::size_t frames = pred.extent(0);
  JointErrors e{Tensor({frames, kJoints})};
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t j = 0; j < kJoints; ++j) {
      const double dx = pred(f, 3 * j) - gt(f, 3 * j);
      const double dy = pred(f, 3 * j + 1) - gt(f, 3 * j + 1);
      const double dz = pred(f, 3 * j + 2) - gt(f, 3 * j + 2);
      e.distances(f, j) = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  return e;
}

double mean_epe(const JointErrors& e) {
  if (e.distances.size() == 0) throw InvalidArgument("mean_epe: empty input");
  double s = 0.0;
  for (double v : e.distances.values()) s += v;
  return s / static_cast<double>(e.distances.size());
}

double median_epe(const JointErrors& e) {
  if (e.distances.size() == 0) throw InvalidArgument("median_epe: empty input");
  std::vector<double> sorted(e.distances.values().begin(),
                             e.distances.values().end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

Curve pck(const JointErrors& e, std::span<const double> thresholds) {
  Curve c;
  c.thresholds.assign(thresholds.begin(), thresholds.end());
  c.values.reserve(thresholds.size());
  const double total = static_cast<double>(e.distances.size());
  for (double d : thresholds) {
    std::size_t within = 0;
    for (double v : e.distances.values()) {
      if (v <= d) ++within;
    }
    c.values.push_back(static_cast<double>(within) / total);
  }
  return c;
}

Curve pcf(const JointErrors& e, std::span<const double> thresholds) {
  Curve c;
  c.thresholds.assign(thresholds.begin(), thresholds.end());
  c.values.reserve(thresholds.size());
  const std::size_t frames = e.frames();
  std::vector<double> frame_max(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    double mx = 0.0;
    for (std::size_t j = 0; j < e.joints(); ++j) {
      mx = std::max(mx, e.distances(f, j));
    }
    frame_max[f] = mx;
  }
  for (double d : thresholds) {
    std::size_t within = 0;
    for (double mx : frame_max) {
      if (mx <= d) ++within;
    }
    c.values.push_back(static_cast<double>(within) / static_cast<double>(frames));
  }
  return c;
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open curve file for writing: " + path);
  out << "threshold,value\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out << format_real(curve.thresholds[i]) << ',' << format_real(curve.values[i])
        << '\n';
  }
  if (!out) throw IoError("curve write failed: " + path);
}

}  // namespace xmvae
