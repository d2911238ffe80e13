#include "chase/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chase {

namespace {
constexpr double kDepthTieTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

CameraIntrinsics CameraIntrinsics::from_fov(int width, int height, double hfov, double near_clip) {
  if (!(hfov > 0.0 && hfov < M_PI)) throw std::invalid_argument("field of view must lie in (0, pi)");
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = k.fy = 0.5 * width / std::tan(0.5 * hfov);
  k.cx = 0.5 * (width - 1);
  k.cy = 0.5 * (height - 1);
  k.near_clip = near_clip;
  k.validate();
  return k;
}

void CameraIntrinsics::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("image size must be at least 1x1");
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("focal lengths must be positive");
  if (!(near_clip > 0.0)) throw std::invalid_argument("near clip must be positive");
}

LabeledImage::LabeledImage(int width, int height, ColorRGB clear_color)
    : width_(width),
      height_(height),
      clear_(clear_color),
      color_(static_cast<std::size_t>(width) * height, clear_color),
      label_(color_.size(), PixelLabel::kEmpty),
      depth_(color_.size(), kInf) {
  if (width < 1 || height < 1) throw std::invalid_argument("image size must be at least 1x1");
}

std::optional<double> LabeledImage::depth(std::size_t i) const {
  if (label_[i] == PixelLabel::kEmpty) return std::nullopt;
  return depth_[i];
}

void LabeledImage::set(std::size_t i, ColorRGB c, PixelLabel label, double depth) {
  if (label == PixelLabel::kEmpty) {
    clear(i);
    return;
  }
  color_[i] = c;
  label_[i] = label;
  depth_[i] = depth;
}

void LabeledImage::clear(std::size_t i) {
  color_[i] = clear_;
  label_[i] = PixelLabel::kEmpty;
  depth_[i] = kInf;
}

std::size_t LabeledImage::count(PixelLabel label) const {
  return static_cast<std::size_t>(std::count(label_.begin(), label_.end(), label));
}

std::optional<Projection> project_point(const CameraIntrinsics& k, const Pose& camera_pose, const Vec3& point) {
  const Vec3 pc = camera_pose.apply_inverse(point);
  if (!(pc.z() >= k.near_clip)) return std::nullopt;
  const double uf = std::floor(k.fx * pc.x() / pc.z() + k.cx + 0.5);
  const double vf = std::floor(k.fy * pc.y() / pc.z() + k.cy + 0.5);
  if (uf < 0.0 || vf < 0.0 || uf >= k.width || vf >= k.height) return std::nullopt;
  return Projection{{static_cast<int>(uf), static_cast<int>(vf)}, pc.z()};
}

LabeledImage synthesize_view(const RgbPointCloud& actor, const RgbPointCloud& background, const Pose& camera_pose,
                             const CameraIntrinsics& intrinsics, const RenderOptions& options) {
  intrinsics.validate();
  if (options.splat_radius < 0) throw std::invalid_argument("splat radius must be non-negative");

  LabeledImage image(intrinsics.width, intrinsics.height, options.clear_color);
  const int r = options.splat_radius;

  auto paint = [&](const RgbPointCloud& cloud, PixelLabel label) {
    for (const auto& p : cloud.points) {
      const auto proj = project_point(intrinsics, camera_pose, p.position);
      if (!proj) continue;
      const int u0 = std::max(proj->pixel.u - r, 0);
      const int u1 = std::min(proj->pixel.u + r, intrinsics.width - 1);
      const int v0 = std::max(proj->pixel.v - r, 0);
      const int v1 = std::min(proj->pixel.v + r, intrinsics.height - 1);
      for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
          const std::size_t i = image.index(u, v);
          const auto current = image.depth(i);
          if (!current || proj->depth < *current - kDepthTieTol) {
            image.set(i, p.color, label, proj->depth);
          }
        }
      }
    }
  };
  // Actor points carry the lower indices.
  paint(actor, PixelLabel::kActor);
  paint(background, PixelLabel::kBackground);
  return image;
}

}  // namespace chase
