#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "chase/rhp.hpp"

namespace chase {

// Scenario files are JSON objects. Keys:
//   background_ply, actor_ply       paths, relative to the scenario file
//   actor_path                      [[t, x, y, z], ...]
//   duration_s, tick_hz, drone_start [x, y, z], observation_noise, seed,
//   score_executed
// plus every planner key accepted by apply_planner_key. Unknown keys are
// rejected so that typos do not silently fall back to defaults.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

// Every field, defaults included; paths are written as given.
nlohmann::json scenario_to_json(const Scenario& scenario);

// Reads `path`, overlays `overrides` key by key, then parses.
Scenario load_scenario(const std::filesystem::path& path, const nlohmann::json& overrides = nlohmann::json::object());

// Planner keys: horizon_s, steps, lambda, r_d, r_max, azimuth_count,
// elevation_deg (single ring) or elevations_deg (list), min_elevation_deg,
// poly_order, rho, replan_threshold, prediction_window, image_width,
// image_height, fov_deg, near_clip, splat_radius, clear_color,
// bins_per_channel, hist_bins, eps, eps_den, eps_r, w_max, d_c, threads.
// Returns false if `key` is not a planner key. Throws ParseError on a bad value.
bool apply_planner_key(PlannerConfig& config, const std::string& key, const nlohmann::json& value);
nlohmann::json planner_to_json(const PlannerConfig& config);

// Single-horizon planning request for the `plan` command.
struct PlanRequest {
  std::filesystem::path background_ply;
  std::filesystem::path actor_ply;
  double t0 = 0.0;
  InitialState drone;
  std::vector<Pose> predictions;  // N poses at t0 + i*H/N
  PlannerConfig planner;
};

// Keys: background_ply, actor_ply, t0, drone {position, velocity,
// acceleration}, predictions [[x, y, z, yaw], ...] plus planner keys.
// `steps` follows the prediction count.
PlanRequest plan_request_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PlanRequest load_plan_request(const std::filesystem::path& path,
                              const nlohmann::json& overrides = nlohmann::json::object());

}  // namespace chase
