#pragma once

#include <cstdint>
#include <filesystem>

#include "chase/detect.hpp"
#include "chase/rhp.hpp"

namespace chase {

// Synthetic scenes used by the bundled scenario, the tests and the
// acceptance checks. All colour noise is drawn from the given seed.

// Pedestrian about 1.8 m tall with its body origin at mid height (0.9 m
// above the feet): dark trousers, white shirt, skin-toned head.
RgbPointCloud make_pedestrian(std::uint64_t seed, std::size_t point_count = 2000);

// Straight street along x in [-50, 50]: grey ground at z = 0, a white
// snow-covered wall at y = -8 and a brick wall at y = +8, both 10 m high.
RgbPointCloud make_street_background(std::uint64_t seed);

// Walk along the street centre line (y = 0) from x = -30 to x = 30 with a
// slowdown in the middle; body origin 0.9 m above the ground.
std::vector<ActorWaypoint> street_actor_path();

// Street scenario with default planner settings. The drone starts on the
// brick side of the actor, so its initial view shows the white wall.
Scenario make_street_scenario(const std::filesystem::path& actor_ply, const std::filesystem::path& background_ply);

// Sky-blue box at the origin between a brown wall (y = -6) and a sky-blue
// wall (y = +6) over grey ground. `camera_distinct` sees the box against
// the brown wall, `camera_ambiguous` against the sky-blue one.
struct TwoCameraScene {
  SceneClouds clouds;
  Pose actor_pose;
  Vec3 camera_distinct;
  Vec3 camera_ambiguous;
};
TwoCameraScene make_two_camera_scene(std::uint64_t seed);

}  // namespace chase
