#include "chase/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace chase {

namespace {

class ColorNoise {
 public:
  explicit ColorNoise(std::uint64_t seed) : rng_(seed) {}

  ColorRGB jitter(ColorRGB base, int amplitude) {
    std::uniform_int_distribution<int> d(-amplitude, amplitude);
    auto ch = [&](std::uint8_t c) { return static_cast<std::uint8_t>(std::clamp(c + d(rng_), 0, 255)); };
    return {ch(base.r), ch(base.g), ch(base.b)};
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

// Regular grid over a rectangle spanned by `a` and `b` from `origin`.
template <typename ColorFn>
void add_grid(RgbPointCloud& cloud, const Vec3& origin, const Vec3& a, const Vec3& b, double spacing,
              ColorFn&& color_at) {
  const int na = static_cast<int>(std::floor(a.norm() / spacing)) + 1;
  const int nb = static_cast<int>(std::floor(b.norm() / spacing)) + 1;
  const Vec3 da = a.normalized() * spacing;
  const Vec3 db = b.normalized() * spacing;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const Vec3 p = origin + da * i + db * j;
      cloud.points.push_back({p, color_at(p)});
    }
  }
}

}  // namespace

RgbPointCloud make_pedestrian(std::uint64_t seed, std::size_t point_count) {
  ColorNoise noise(seed);
  RgbPointCloud cloud;
  cloud.points.reserve(point_count);
  constexpr ColorRGB kTrousers{45, 45, 55};
  constexpr ColorRGB kShirt{246, 246, 246};
  constexpr ColorRGB kSkin{222, 182, 150};
  for (std::size_t i = 0; i < point_count; ++i) {
    const double z = noise.uniform(-0.9, 0.9);
    const double phi = noise.uniform(0.0, 2.0 * M_PI);
    double rx = 0.22;
    double ry = 0.14;
    ColorRGB base = kShirt;
    int amp = 8;
    if (z < 0.0) {
      base = kTrousers;
      rx = 0.18;
      ry = 0.12;
      amp = 10;
    } else if (z > 0.6) {
      base = kSkin;
      rx = 0.1;
      ry = 0.1;
    }
    cloud.points.push_back({Vec3(rx * std::cos(phi), ry * std::sin(phi), z), noise.jitter(base, amp)});
  }
  return cloud;
}

RgbPointCloud make_street_background(std::uint64_t seed) {
  ColorNoise noise(seed);
  RgbPointCloud cloud;
  constexpr double kHalfLength = 50.0;
  constexpr double kWallY = 8.0;
  constexpr double kWallHeight = 10.0;

  add_grid(cloud, Vec3(-kHalfLength, -kWallY, 0.0), Vec3(2 * kHalfLength, 0, 0), Vec3(0, 2 * kWallY, 0), 0.26,
           [&](const Vec3&) { return noise.jitter({104, 104, 100}, 12); });

  add_grid(cloud, Vec3(-kHalfLength, -kWallY, 0.0), Vec3(2 * kHalfLength, 0, 0), Vec3(0, 0, kWallHeight), 0.3,
           [&](const Vec3&) { return noise.jitter({240, 242, 246}, 10); });

  add_grid(cloud, Vec3(-kHalfLength, kWallY, 0.0), Vec3(2 * kHalfLength, 0, 0), Vec3(0, 0, kWallHeight), 0.3,
           [&](const Vec3& p) {
             // 0.25 m courses with a thin mortar line at the bottom of each.
             const double course = std::fmod(p.z(), 0.25);
             if (course < 0.05) return noise.jitter({190, 185, 175}, 10);
             return noise.jitter({150, 62, 42}, 14);
           });
  return cloud;
}

std::vector<ActorWaypoint> street_actor_path() {
  return {
      {0.0, Vec3(-30.0, 0.0, 0.9)},
      {20.0, Vec3(-8.0, 0.0, 0.9)},
      {32.0, Vec3(0.0, 0.0, 0.9)},
      {60.0, Vec3(30.0, 0.0, 0.9)},
  };
}

Scenario make_street_scenario(const std::filesystem::path& actor_ply, const std::filesystem::path& background_ply) {
  Scenario s;
  s.actor_ply = actor_ply;
  s.background_ply = background_ply;
  s.actor_path = street_actor_path();
  s.duration_s = 60.0;
  s.tick_hz = 20.0;
  const double elev = 20.0 * M_PI / 180.0;
  const Vec3 start = s.actor_path.front().position;
  s.drone_start = start + 5.0 * Vec3(0.0, std::cos(elev), std::sin(elev));
  return s;
}

TwoCameraScene make_two_camera_scene(std::uint64_t seed) {
  ColorNoise noise(seed);
  constexpr ColorRGB kSkyBlue{135, 206, 235};
  TwoCameraScene scene;

  // 0.6 m box, surface points only.
  auto& actor = scene.clouds.actor.points;
  constexpr double h = 0.3;
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const double sign = face % 2 == 0 ? -1.0 : 1.0;
    for (int i = 0; i <= 12; ++i) {
      for (int j = 0; j <= 12; ++j) {
        Vec3 p;
        p[axis] = sign * h;
        p[(axis + 1) % 3] = -h + 2 * h * i / 12.0;
        p[(axis + 2) % 3] = -h + 2 * h * j / 12.0;
        actor.push_back({p, noise.jitter(kSkyBlue, 8)});
      }
    }
  }
  scene.actor_pose = Pose::from_translation(Vec3(0.0, 0.0, 0.3));

  auto& bg = scene.clouds.background;
  add_grid(bg, Vec3(-20, -6, 0), Vec3(40, 0, 0), Vec3(0, 12, 0), 0.3,
           [&](const Vec3&) { return noise.jitter({110, 110, 110}, 10); });
  add_grid(bg, Vec3(-20, -6, 0), Vec3(40, 0, 0), Vec3(0, 0, 12), 0.3,
           [&](const Vec3&) { return noise.jitter({120, 72, 38}, 12); });
  add_grid(bg, Vec3(-20, 6, 0), Vec3(40, 0, 0), Vec3(0, 0, 12), 0.3,
           [&](const Vec3&) { return noise.jitter(kSkyBlue, 8); });

  scene.camera_distinct = Vec3(0.0, 4.0, 1.5);
  scene.camera_ambiguous = Vec3(0.0, -4.0, 1.5);
  return scene;
}

}  // namespace chase
