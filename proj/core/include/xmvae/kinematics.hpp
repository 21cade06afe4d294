#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xmvae/rng.hpp"

namespace xmvae {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};
struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline constexpr std::size_t kHandJoints = 21;
inline constexpr std::size_t kHandBones = 20;
inline constexpr std::size_t kHandDof = 26;

using Joints3 = std::array<Vec3, kHandJoints>;
using Joints2 = std::array<Vec2, kHandJoints>;

enum class Handedness : std::uint8_t { kLeft, kRight };

// Joint ordering used throughout: 0 is the palm root, then five fingers in
// thumb, index, middle, ring, pinky order, each base to tip. Converters from
// other keypoint layouts must remap to this ordering. The first
// middle-finger joint (index 9) anchors the scale normalization.
inline constexpr std::size_t kPalmJoint = 0;
inline constexpr std::size_t kMiddleBaseJoint = 9;

/// 21-joint kinematic tree with fixed per-bone rest directions and lengths.
/// Bone b connects parent_of(b + 1) to joint b + 1.
///
/// Degrees of freedom (kHandDof = 26), in order: global rotation rx, ry, rz;
/// global translation tx, ty, tz; then per finger: abduction, base flexion,
/// middle flexion, distal flexion.
struct HandSkeleton {
  std::array<Vec3, kHandBones> rest_dir;
  std::array<double, kHandBones> length;

  static HandSkeleton canonical();
  static std::size_t parent_of(std::size_t joint);
  double reference_bone_length() const { return length[bone_of(kMiddleBaseJoint)]; }
  static std::size_t bone_of(std::size_t joint) { return joint - 1; }
};

/// Bone edges as (parent, child) joint index pairs, for rendering.
std::array<std::pair<std::size_t, std::size_t>, kHandBones> hand_bone_edges();

// Joint limits: finger flexion in [0, pi/2], abduction in [-15deg, +15deg].
// The global pose is unconstrained.
inline constexpr double kFlexionMax = 1.5707963267948966;
inline constexpr double kAbductionMax = 0.2617993877991494;

/// Throws DomainError if any finger angle is outside its limit or any value
/// is non-finite.
void validate_angles(std::span<const double> angles);

/// Places the 21 joints of a right hand in the root frame. Per-joint
/// rotations are composed down the tree; bone lengths are preserved.
Joints3 forward_kinematics(const HandSkeleton& skel,
                           std::span<const double> angles);

Joints3 mirror_x(const Joints3& joints);

struct Camera {
  double focal = 420.0;
  Vec2 principal{0.0, 0.0};
  double hand_distance = 6.0;  // depth offset applied before projection

  static Camera canonical() { return {}; }
};

/// Pinhole projection of root-frame joints: each (X, Y, Z) maps to
/// (focal*X/(Z+d) + cx, focal*Y/(Z+d) + cy). Throws DomainError if any
/// offset depth is not positive.
Joints2 project(const Joints3& joints, const Camera& cam);

/// One synthetic hand instance. joints3d/joints2d are consistent by
/// construction (joints2d = project(joints3d)); left hands are the exact
/// x-mirror of the right-handed kinematic solution.
struct PoseSample {
  std::vector<double> angles;  // kHandDof entries
  Joints3 joints3d;
  Joints2 joints2d;
  Handedness handedness = Handedness::kRight;
  bool labeled = true;
};

PoseSample make_sample(const HandSkeleton& skel, const Camera& cam,
                       std::span<const double> angles, Handedness handedness,
                       bool labeled);

struct NormalizeFlags {
  bool translation = false;  // T: palm-relative coordinates
  bool scale = false;        // S: divide by the palm->middle-base distance
  bool mirror = false;       // H: mirror left hands so all data is right-handed
};

struct Normalized3 {
  Joints3 joints;
  double scale_divisor = 1.0;
};
struct Normalized2 {
  Joints2 joints;
  double scale_divisor = 1.0;
};

/// T subtracts the palm joint, S divides by the palm->first-middle-joint
/// distance (returned as scale_divisor), H mirrors left hands across the
/// x-axis. Throws DomainError when S meets a degenerate reference bone.
Normalized3 normalize_pose(const Joints3& joints, NormalizeFlags flags,
                           Handedness handedness);
Normalized2 normalize_pose(const Joints2& joints, NormalizeFlags flags,
                           Handedness handedness);

/// Replaces joint 0 with the midpoint of joint 0 and the first
/// middle-finger joint, for datasets that annotate the wrist rather than
/// the palm.
Joints3 wrist_to_palm(const Joints3& joints);
Joints2 wrist_to_palm(const Joints2& joints);

struct AugmentParams {
  double roll = 0.0;  // in-image-plane rotation, radians
  bool flip = false;  // mirror across the vertical image axis
};

/// Applies the same rigid image-plane motion to both modalities: the 2D
/// keypoints rotate about the principal point while the 3D joints roll
/// about the optical axis, so re-projection stays consistent. A flip
/// toggles handedness.
PoseSample augment(const PoseSample& sample, const Camera& cam,
                   const AugmentParams& params);

/// Samples roll uniform in [-45deg, +45deg] and a flip with probability 1/2.
PoseSample augment(const PoseSample& sample, const Camera& cam, Rng& rng);

/// Deterministic synthetic dataset: angles uniform within joint limits, a
/// free global rotation, a small global translation and random handedness.
/// Exactly round(label_fraction * n) samples are marked labeled. Each
/// sample's randomness derives from (seed, index).
std::vector<PoseSample> generate_dataset(const HandSkeleton& skel,
                                         const Camera& cam, std::size_t n,
                                         std::uint64_t seed,
                                         double label_fraction);

}  // namespace xmvae
