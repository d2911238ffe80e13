#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace chase {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct ColorRGB {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const ColorRGB&, const ColorRGB&) = default;
};

// Rigid transform in SE(3). Maps a point from the local frame into the parent
// frame: p_parent = rotation * p_local + translation.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  // Throws std::invalid_argument unless `rotation` is orthonormal with
  // determinant +1 (within 1e-9) and every entry is finite.
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Vec3& t) { return Pose(Mat3::Identity(), t); }
  // Rotation by `yaw` radians about world +z, then translation.
  static Pose from_yaw(double yaw, const Vec3& t);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  // Parent-frame point expressed in the local frame.
  Vec3 apply_inverse(const Vec3& p) const { return rotation_.transpose() * (p - translation_); }

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct ColoredPoint {
  Vec3 position;
  ColorRGB color;
};

struct RgbPointCloud {
  std::vector<ColoredPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

bool is_finite(const Vec3& v);

RgbPointCloud transform_cloud(const RgbPointCloud& cloud, const Pose& pose);

// Camera frame convention: +z is the optical axis, +x points right in the
// image and +y points down. The returned pose maps camera coordinates into
// the world frame, with the camera centre at `center`. Throws
// DegenerateGeometry if center == target or up_hint is parallel to the
// viewing direction.
Pose look_at_pose(const Vec3& center, const Vec3& target, const Vec3& up_hint = Vec3::UnitZ());

}  // namespace chase
