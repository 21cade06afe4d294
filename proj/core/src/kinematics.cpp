#include "xmvae/kinematics.hpp"

#include <cmath>

#include "xmvae/error.hpp"

namespace xmvae {

namespace {

struct Mat3 {
  // Row-major 3x3.
  double m[9];

  static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 mul(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        r.m[i * 3 + j] = m[i * 3] * o.m[j] + m[i * 3 + 1] * o.m[3 + j] +
                         m[i * 3 + 2] * o.m[6 + j];
      }
    }
    return r;
  }

  /// Rodrigues rotation about a unit axis.
  static Mat3 about_axis(const Vec3& u, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    return {{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y,
             t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x,
             t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}};
  }
};

Vec3 add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 scale(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }

constexpr double kDeg = 0.017453292519943295;

// Finger splay directions in the palm plane (angle from +y) and bone
// lengths, thumb through pinky. Arbitrary but anatomically plausible units;
// the palm->middle-base bone is the scale reference.
constexpr double kSplayDeg[5] = {-55.0, -20.0, 0.0, 18.0, 38.0};
constexpr double kBoneLengths[5][4] = {
    {0.40, 0.36, 0.30, 0.24},  // thumb
    {0.92, 0.38, 0.28, 0.22},  // index
    {0.90, 0.42, 0.30, 0.24},  // middle
    {0.86, 0.38, 0.28, 0.22},  // ring
    {0.80, 0.30, 0.22, 0.18},  // pinky
};

}  // namespace

HandSkeleton HandSkeleton::canonical() {
  HandSkeleton skel;
  for (std::size_t f = 0; f < 5; ++f) {
    const double splay = kSplayDeg[f] * kDeg;
    const Vec3 dir{std::sin(splay), std::cos(splay), 0.0};
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t bone = f * 4 + b;
      skel.rest_dir[bone] = dir;
      skel.length[bone] = kBoneLengths[f][b];
    }
  }
  return skel;
}

std::size_t HandSkeleton::parent_of(std::size_t joint) {
  if (joint == 0 || joint >= kHandJoints) throw DomainError("parent_of: bad joint index");
  return (joint - 1) % 4 == 0 ? 0 : joint - 1;
}

std::array<std::pair<std::size_t, std::size_t>, kHandBones> hand_bone_edges() {
  std::array<std::pair<std::size_t, std::size_t>, kHandBones> edges;
  for (std::size_t j = 1; j < kHandJoints; ++j) {
    edges[j - 1] = {HandSkeleton::parent_of(j), j};
  }
  return edges;
}

void validate_angles(std::span<const double> angles) {
  if (angles.size() != kHandDof) {
    throw DomainError("expected " + std::to_string(kHandDof) + " joint angles, got " +
                      std::to_string(angles.size()));
  }
  for (double a : angles) {
    if (!std::isfinite(a)) throw DomainError("non-finite joint angle");
  }
  constexpr double kTol = 1e-12;
  for (std::size_t f = 0; f < 5; ++f) {
    const double abd = angles[6 + f * 4];
    if (std::abs(abd) > kAbductionMax + kTol) {
      throw DomainError("abduction angle out of limits for finger " + std::to_string(f));
    }
    for (std::size_t k = 1; k < 4; ++k) {
      const double flex = angles[6 + f * 4 + k];
      if (flex < -kTol || flex > kFlexionMax + kTol) {
        throw DomainError("flexion angle out of limits for finger " + std::to_string(f));
      }
    }
  }
}

Joints3 forward_kinematics(const HandSkeleton& skel,
                           std::span<const double> angles) {
  validate_angles(angles);

  const Mat3 global = Mat3::about_axis({0, 0, 1}, angles[2])
                          .mul(Mat3::about_axis({0, 1, 0}, angles[1]))
                          .mul(Mat3::about_axis({1, 0, 0}, angles[0]));
  const Vec3 root{angles[3], angles[4], angles[5]};

  Joints3 joints;
  joints[0] = root;
  for (std::size_t f = 0; f < 5; ++f) {
    const Vec3 dir = skel.rest_dir[f * 4];
    // Flexion axis: in-plane normal of the rest direction, so positive
    // flexion curls toward -z. Abduction swings about the palm normal.
    const Vec3 flex_axis{-dir.y, dir.x, 0.0};
    const double abd = angles[6 + f * 4];

    Mat3 frame = global;
    Vec3 pos = root;

    // Palm->base bone is rigid with the palm.
    pos = add(pos, frame.apply(scale(dir, skel.length[f * 4])));
    joints[1 + f * 4] = pos;

    frame = frame.mul(Mat3::about_axis({0, 0, 1}, abd));
    for (std::size_t seg = 1; seg < 4; ++seg) {
      const double flex = angles[6 + f * 4 + seg];
      frame = frame.mul(Mat3::about_axis(flex_axis, flex));
      pos = add(pos, frame.apply(scale(dir, skel.length[f * 4 + seg])));
      joints[1 + f * 4 + seg] = pos;
    }
  }
  return joints;
}

Joints3 mirror_x(const Joints3& joints) {
  Joints3 out = joints;
  for (Vec3& p : out) p.x = -p.x;
  return out;
}

Joints2 project(const Joints3& joints, const Camera& cam) {
  Joints2 out;
  for (std::size_t j = 0; j < kHandJoints; ++j) {
    const double depth = joints[j].z + cam.hand_distance;
    if (depth <= 0.0) {
      throw DomainError("project: joint " + std::to_string(j) +
                        " has non-positive depth");
    }
    out[j] = {cam.focal * joints[j].x / depth + cam.principal.x,
              cam.focal * joints[j].y / depth + cam.principal.y};
  }
  return out;
}

PoseSample make_sample(const HandSkeleton& skel, const Camera& cam,
                       std::span<const double> angles, Handedness handedness,
                       bool labeled) {
  PoseSample s;
  s.angles.assign(angles.begin(), angles.end());
  s.joints3d = forward_kinematics(skel, angles);
  if (handedness == Handedness::kLeft) s.joints3d = mirror_x(s.joints3d);
  s.joints2d = project(s.joints3d, cam);
  s.handedness = handedness;
  s.labeled = labeled;
  return s;
}

namespace {

template <typename Joints, typename Point>
void apply_translation(Joints& joints, const Point& palm);

template <>
void apply_translation(Joints3& joints, const Vec3& palm) {
  for (Vec3& p : joints) {
    p.x -= palm.x;
    p.y -= palm.y;
    p.z -= palm.z;
  }
}

template <>
void apply_translation(Joints2& joints, const Vec2& palm) {
  for (Vec2& p : joints) {
    p.x -= palm.x;
    p.y -= palm.y;
  }
}

double ref_distance(const Joints3& joints) {
  const Vec3 d{joints[kMiddleBaseJoint].x - joints[kPalmJoint].x,
               joints[kMiddleBaseJoint].y - joints[kPalmJoint].y,
               joints[kMiddleBaseJoint].z - joints[kPalmJoint].z};
  return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

double ref_distance(const Joints2& joints) {
  const double dx = joints[kMiddleBaseJoint].x - joints[kPalmJoint].x;
  const double dy = joints[kMiddleBaseJoint].y - joints[kPalmJoint].y;
  return std::sqrt(dx * dx + dy * dy);
}

template <typename Normalized, typename Joints>
Normalized normalize_impl(const Joints& joints, NormalizeFlags flags,
                          Handedness handedness) {
  Normalized out{joints, 1.0};
  if (flags.translation) apply_translation(out.joints, out.joints[kPalmJoint]);
  if (flags.scale) {
    const double ref = ref_distance(out.joints);
    if (ref <= 0.0) throw DomainError("normalize_pose: degenerate reference bone");
    out.scale_divisor = ref;
    for (auto& p : out.joints) {
      p.x /= ref;
      p.y /= ref;
      if constexpr (requires { p.z; }) p.z /= ref;
    }
  }
  if (flags.mirror && handedness == Handedness::kLeft) {
    for (auto& p : out.joints) p.y = -p.y;
  }
  return out;
}

}  // namespace

Normalized3 normalize_pose(const Joints3& joints, NormalizeFlags flags,
                           Handedness handedness) {
  return normalize_impl<Normalized3>(joints, flags, handedness);
}

Normalized2 normalize_pose(const Joints2& joints, NormalizeFlags flags,
                           Handedness handedness) {
  return normalize_impl<Normalized2>(joints, flags, handedness);
}

Joints3 wrist_to_palm(const Joints3& joints) {
  Joints3 out = joints;
  out[0] = {0.5 * (joints[0].x + joints[kMiddleBaseJoint].x),
            0.5 * (joints[0].y + joints[kMiddleBaseJoint].y),
            0.5 * (joints[0].z + joints[kMiddleBaseJoint].z)};
  return out;
}

Joints2 wrist_to_palm(const Joints2& joints) {
  Joints2 out = joints;
  out[0] = {0.5 * (joints[0].x + joints[kMiddleBaseJoint].x),
            0.5 * (joints[0].y + joints[kMiddleBaseJoint].y)};
  return out;
}

PoseSample augment(const PoseSample& sample, const Camera& cam,
                   const AugmentParams& params) {
  PoseSample out = sample;
  const double c = std::cos(params.roll), s = std::sin(params.roll);

  for (Vec3& p : out.joints3d) {
    const double x = p.x, y = p.y;
    p.x = c * x - s * y;
    p.y = s * x + c * y;
  }
  for (Vec2& p : out.joints2d) {
    const double u = p.x - cam.principal.x, v = p.y - cam.principal.y;
    p.x = c * u - s * v + cam.principal.x;
    p.y = s * u + c * v + cam.principal.y;
  }

  if (params.flip) {
    for (Vec3& p : out.joints3d) p.x = -p.x;
    for (Vec2& p : out.joints2d) p.x = -(p.x - cam.principal.x) + cam.principal.x;
    out.handedness = out.handedness == Handedness::kLeft ? Handedness::kRight
                                                         : Handedness::kLeft;
  }
  return out;
}

PoseSample augment(const PoseSample& sample, const Camera& cam, Rng& rng) {
  AugmentParams params;
  params.roll = rng.uniform(-45.0 * kDeg, 45.0 * kDeg);
  params.flip = rng.coin();
  return augment(sample, cam, params);
}

std::vector<PoseSample> generate_dataset(const HandSkeleton& skel,
                                         const Camera& cam, std::size_t n,
                                         std::uint64_t seed,
                                         double label_fraction) {
  if (n == 0) throw InvalidArgument("generate_dataset: n must be >= 1");
  if (label_fraction <= 0.0 || label_fraction > 1.0) {
    throw InvalidArgument("generate_dataset: label fraction must be in (0, 1]");
  }

  const auto labeled_count =
      static_cast<std::size_t>(std::llround(label_fraction * static_cast<double>(n)));
  Rng mask_rng(Rng::derive(seed, rng_tag::kLabelMask));
  std::vector<std::size_t> order = mask_rng.permutation(n);
  std::vector<bool> labeled(n, false);
  for (std::size_t i = 0; i < labeled_count && i < n; ++i) labeled[order[i]] = true;

  constexpr double kPi = 3.141592653589793238462643383279;
  std::vector<PoseSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(Rng::derive(seed, rng_tag::kGenerate, i));
    std::array<double, kHandDof> angles{};
    for (int a = 0; a < 3; ++a) angles[a] = rng.uniform(-kPi, kPi);
    for (int a = 3; a < 6; ++a) angles[a] = rng.uniform(-0.3, 0.3);
    for (std::size_t f = 0; f < 5; ++f) {
      angles[6 + f * 4] = rng.uniform(-kAbductionMax, kAbductionMax);
      for (std::size_t k = 1; k < 4; ++k) {
        angles[6 + f * 4 + k] = rng.uniform(0.0, kFlexionMax);
      }
    }
    const Handedness hand = rng.coin() ? Handedness::kLeft : Handedness::kRight;
    samples.push_back(make_sample(skel, cam, angles, hand, labeled[i]));
  }
  return samples;
}

}  // namespace xmvae
