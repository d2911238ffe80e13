#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chase/geom.hpp"

namespace chase {

struct CameraIntrinsics {
  int width = 96;
  int height = 72;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double near_clip = 0.05;

  // Square pixels, principal point at the image centre, `hfov` the full
  // horizontal field of view in radians.
  static CameraIntrinsics from_fov(int width, int height, double hfov, double near_clip = 0.05);

  // Throws std::invalid_argument on non-positive size, focal length or clip.
  void validate() const;
};

enum class PixelLabel : std::uint8_t { kEmpty = 0, kActor = 1, kBackground = 2 };

struct Pixel {
  int u = 0;  // column
  int v = 0;  // row
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Row-major image with colour, depth and source label per pixel. Depth is
// present exactly when the label is ACTOR or BACKGROUND.
class LabeledImage {
 public:
  LabeledImage(int width, int height, ColorRGB clear_color = {128, 128, 128});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return color_.size(); }
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width_ + u; }
  Pixel pixel_at(std::size_t idx) const { return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)}; }

  const ColorRGB& color(std::size_t i) const { return color_[i]; }
  PixelLabel label(std::size_t i) const { return label_[i]; }
  std::optional<double> depth(std::size_t i) const;
  ColorRGB clear_color() const { return clear_; }

  void set(std::size_t i, ColorRGB c, PixelLabel label, double depth);
  void clear(std::size_t i);

  std::size_t count(PixelLabel label) const;

  const std::vector<ColorRGB>& colors() const { return color_; }
  const std::vector<PixelLabel>& labels() const { return label_; }

  friend bool operator==(const LabeledImage&, const LabeledImage&) = default;

 private:
  int width_;
  int height_;
  ColorRGB clear_;
  std::vector<ColorRGB> color_;
  std::vector<PixelLabel> label_;
  std::vector<double> depth_;  // +inf where EMPTY
};

struct Projection {
  Pixel pixel;
  double depth = 0.0;
};

std::optional<Projection> project_point(const CameraIntrinsics& intrinsics, const Pose& camera_pose,
                                        const Vec3& point);

struct RenderOptions {
  int splat_radius = 1;
  ColorRGB clear_color{128, 128, 128};
};

// Z-buffered splat rendering of actor and background clouds. Points are
// indexed actor first, then background; on depth ties within 1e-9 m the
// lower index keeps the pixel.
LabeledImage synthesize_view(const RgbPointCloud& actor, const RgbPointCloud& background, const Pose& camera_pose,
                             const CameraIntrinsics& intrinsics, const RenderOptions& options = {});

}  // namespace chase
