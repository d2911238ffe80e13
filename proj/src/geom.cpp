#include "chase/geom.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "chase/error.hpp"

namespace chase {

namespace {
constexpr double kOrthoTol = 1e-9;
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !is_finite(translation)) {
    throw std::invalid_argument("pose has non-finite entries");
  }
  const double ortho_err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kOrthoTol || std::abs(rotation.determinant() - 1.0) > kOrthoTol) {
    throw std::invalid_argument("pose rotation is not a proper orthonormal matrix");
  }
}

Pose Pose::from_yaw(double yaw, const Vec3& t) {
  return Pose(Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), t);
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

bool is_finite(const Vec3& v) { return v.allFinite(); }

RgbPointCloud transform_cloud(const RgbPointCloud& cloud, const Pose& pose) {
  RgbPointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.points.push_back({pose.apply(p.position), p.color});
  }
  return out;
}

Pose look_at_pose(const Vec3& center, const Vec3& target, const Vec3& up_hint) {
  const Vec3 forward = target - center;
  const double len = forward.norm();
  if (!(len > 1e-12)) {
    throw DegenerateGeometry("look_at: camera centre coincides with target");
  }
  const Vec3 z = forward / len;
  Vec3 x = z.cross(up_hint);
  const double xn = x.norm();
  if (!(xn > 1e-9 * std::max(1.0, up_hint.norm()))) {
    throw DegenerateGeometry("look_at: up hint is parallel to the viewing direction");
  }
  x /= xn;
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(r, center);
}

}  // namespace chase
