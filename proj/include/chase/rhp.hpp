#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chase/detect.hpp"
#include "chase/geom.hpp"
#include "chase/graph.hpp"
#include "chase/traj.hpp"

namespace chase {

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

class TargetTrack {
 public:
  // Throws std::invalid_argument unless t is later than the last observation.
  void add(double t, const Pose& pose);
  const std::vector<TimedPose>& observations() const { return obs_; }
  bool empty() const { return obs_.empty(); }
  void clear() { obs_.clear(); }

 private:
  std::vector<TimedPose> obs_;
};

// Position moves along a least-squares line; orientation stays at the latest
// observation.
struct ConstantVelocityPredictor {
  double t_ref = 0.0;  // mean time of the fitted window
  Vec3 position_ref = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double t_last = 0.0;

  Vec3 position_at(double t) const { return position_ref + velocity * (t - t_ref); }
  Pose pose_at(double t) const { return Pose(rotation, position_at(t)); }
};

// Fits the last `window` observations (velocity 0 for a single one). Throws
// std::invalid_argument on an empty track or window 0.
ConstantVelocityPredictor fit_constant_velocity(const TargetTrack& track, std::size_t window);

// Poses at `times`. Throws std::out_of_range for any time later than
// t_last + horizon.
std::vector<Pose> predict(const ConstantVelocityPredictor& predictor, std::span<const double> times, double horizon);

// accum + |observed - predicted| * dt.
double update_accum_err(double accum, const Pose& observed, const Pose& predicted, double dt);

struct PlannerConfig {
  double horizon = 4.0;  // H, seconds
  int steps = 4;         // N
  double lambda = 20.0;
  double r_d = 5.0;
  std::optional<double> r_max;  // defaults to r_d
  int azimuth_count = 8;
  std::vector<double> elevations_deg{20.0};
  double min_elevation_deg = 0.0;
  int poly_order = 5;  // K
  double rho = 100.0;
  double replan_threshold = 0.5;  // m*s
  std::size_t prediction_window = 10;
  ViewEvalParams view;
  int threads = 0;  // 0: CHASE_THREADS or hardware

  double effective_r_max() const { return r_max.value_or(r_d); }
  void validate() const;
};

struct StageTimings {
  double evaluation_s = 0.0;
  double graph_s = 0.0;
  double qp_s = 0.0;
};

struct HorizonPlan {
  std::vector<double> times;  // t_0..t_N
  std::vector<ViewLayer> layers;
  std::vector<std::vector<DetectabilityReport>> reports;  // per layer, per candidate
  LayeredDag dag;
  ViewpointPath path;
  std::vector<DetectabilityReport> chosen_reports;  // per step
  SplineSolution spline;
  double r_max_used = 0.0;
  StageTimings timings;
};

// Candidate viewpoints (all rings, minimum elevation filtered) around each
// prediction, scored in parallel.
std::vector<ViewLayer> evaluate_view_layers(const std::vector<Pose>& predictions, const SceneClouds& clouds,
                                            const PlannerConfig& config,
                                            std::vector<std::vector<DetectabilityReport>>* reports = nullptr);

// One receding-horizon plan from `start` at time t0 over the predictions at
// t0 + i*H/N. With `relax_on_infeasible`, an infeasible DAG is rebuilt once
// with r_max doubled before InfeasiblePlan propagates.
HorizonPlan plan_horizon(const InitialState& start, double t0, const std::vector<Pose>& predictions,
                         const SceneClouds& clouds, const PlannerConfig& config, bool relax_on_infeasible);

struct ActorWaypoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

// Piecewise-linear actor motion; heading follows the active segment.
// Clamped to the first/last waypoint outside the covered time span.
Pose actor_pose_at(const std::vector<ActorWaypoint>& path, double t);

struct Scenario {
  std::filesystem::path background_ply;
  std::filesystem::path actor_ply;
  std::vector<ActorWaypoint> actor_path;
  double duration_s = 60.0;
  double tick_hz = 20.0;
  Vec3 drone_start = Vec3::Zero();
  double observation_noise = 0.0;  // std-dev of position noise on observations, m
  std::uint64_t seed = 0;
  bool score_executed = true;  // evaluate R from the executed pose every tick
  PlannerConfig planner;

  void validate() const;
};

struct TickRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
  Vec3 target = Vec3::Zero();
  double prediction_error = 0.0;
  double accum_err = 0.0;
  bool replanned = false;
  std::size_t active_replan = 0;  // index into MissionLog::replans
  DetectOutcome outcome = DetectOutcome::kOk;
  double variance_ratio = 0.0;
};

struct ReplanRecord {
  std::size_t index = 0;
  double t = 0.0;
  std::string trigger;  // "initial", "error", "horizon"
  double accum_before = 0.0;
  double accum_after = 0.0;
  double r_max_used = 0.0;
  std::vector<Vec3> predicted_targets;
  std::vector<Vec3> viewpoints;
  std::vector<double> viewpoint_r;
  std::vector<double> viewpoint_cost;
  double path_cost = 0.0;
  double spline_objective = 0.0;
  double handoff_error = 0.0;  // max |new - old| over pos/vel/acc at t
  StageTimings timings;
  SplineTrajectory trajectory;
};

struct MissionSummary {
  std::size_t ticks = 0;
  std::size_t replans = 0;
  double travel_distance = 0.0;
  double mean_r = 0.0;
  StageTimings mean_timings;
};

struct MissionLog {
  std::vector<TickRecord> ticks;
  std::vector<ReplanRecord> replans;
  MissionSummary summary;
};

// Loads the clouds named by the scenario (paths as given).
SceneClouds load_scene_clouds(const Scenario& scenario);

MissionLog run_mission(const Scenario& scenario, const SceneClouds& clouds);
MissionLog run_mission(const Scenario& scenario);

std::string mission_csv(const MissionLog& log);
std::string replans_csv(const MissionLog& log);
std::string timings_csv(const MissionLog& log);

}  // namespace chase
