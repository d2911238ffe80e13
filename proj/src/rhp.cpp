#include "chase/rhp.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chase/error.hpp"
#include "chase/io.hpp"
#include "chase/parallel.hpp"
#include "chase/ply.hpp"

namespace chase {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kDegToRad = M_PI / 180.0;

}  // namespace

void TargetTrack::add(double t, const Pose& pose) {
  if (!std::isfinite(t)) throw std::invalid_argument("observation time must be finite");
  if (!obs_.empty() && !(t > obs_.back().t)) {
    throw std::invalid_argument("observation timestamps must be strictly increasing");
  }
  obs_.push_back({t, pose});
}

ConstantVelocityPredictor fit_constant_velocity(const TargetTrack& track, std::size_t window) {
  if (track.empty()) throw std::invalid_argument("cannot fit a predictor to an empty track");
  if (window == 0) throw std::invalid_argument("prediction window must be positive");
  const auto& obs = track.observations();
  const std::size_t n = std::min(window, obs.size());
  const auto first = obs.end() - static_cast<std::ptrdiff_t>(n);

  double t_mean = 0.0;
  Vec3 p_mean = Vec3::Zero();
  for (auto it = first; it != obs.end(); ++it) {
    t_mean += it->t;
    p_mean += it->pose.translation();
  }
  t_mean /= static_cast<double>(n);
  p_mean /= static_cast<double>(n);

  double stt = 0.0;
  Vec3 stp = Vec3::Zero();
  for (auto it = first; it != obs.end(); ++it) {
    const double dt = it->t - t_mean;
    stt += dt * dt;
    stp += dt * (it->pose.translation() - p_mean);
  }

  ConstantVelocityPredictor pred;
  pred.t_ref = t_mean;
  pred.position_ref = p_mean;
  pred.velocity = stt > 0.0 ? Vec3(stp / stt) : Vec3(Vec3::Zero());
  pred.rotation = obs.back().pose.rotation();
  pred.t_last = obs.back().t;
  return pred;
}

std::vector<Pose> predict(const ConstantVelocityPredictor& predictor, std::span<const double> times, double horizon) {
  std::vector<Pose> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t > predictor.t_last + horizon + 1e-9) {
      throw std::out_of_range("prediction time " + std::to_string(t) + " beyond the horizon");
    }
    out.push_back(predictor.pose_at(t));
  }
  return out;
}

double update_accum_err(double accum, const Pose& observed, const Pose& predicted, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return accum + (observed.translation() - predicted.translation()).norm() * dt;
}

void PlannerConfig::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(r_d > 0.0)) throw std::invalid_argument("r_d must be positive");
  if (!(effective_r_max() > 0.0)) throw std::invalid_argument("r_max must be positive");
  if (azimuth_count < 1) throw std::invalid_argument("azimuth_count must be >= 1");
  if (elevations_deg.empty()) throw std::invalid_argument("at least one view ring elevation is required");
  for (double e : elevations_deg) {
    if (!(e >= 0.0 && e < 90.0)) throw std::invalid_argument("ring elevation must lie in [0, 90) degrees");
  }
  if (poly_order < 5) throw std::invalid_argument("poly_order must be >= 5");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(replan_threshold > 0.0)) throw std::invalid_argument("replan_threshold must be positive");
  if (prediction_window < 1) throw std::invalid_argument("prediction_window must be >= 1");
  view.intrinsics.validate();
  view.detect.validate();
  if (view.render.splat_radius < 0) throw std::invalid_argument("splat_radius must be non-negative");
}

std::vector<ViewLayer> evaluate_view_layers(const std::vector<Pose>& predictions, const SceneClouds& clouds,
                                            const PlannerConfig& config,
                                            std::vector<std::vector<DetectabilityReport>>* reports) {
  std::vector<ViewLayer> layers(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto& layer = layers[i];
    layer.step = static_cast<int>(i) + 1;
    layer.target = predictions[i].translation();
    for (double elev : config.elevations_deg) {
      if (elev < config.min_elevation_deg) continue;
      const auto ring = view_sphere(layer.target, config.r_d, config.azimuth_count, elev * kDegToRad);
      layer.candidates.insert(layer.candidates.end(), ring.begin(), ring.end());
    }
    layer.costs.assign(layer.candidates.size(), std::nullopt);
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t c = 0; c < layers[i].candidates.size(); ++c) tasks.emplace_back(i, c);
  }
  std::vector<DetectabilityReport> results(tasks.size());
  parallel_for(tasks.size(), resolve_thread_count(config.threads), [&](std::size_t k) {
    const auto [i, c] = tasks[k];
    results[k] = evaluate_viewpoint(predictions[i], clouds, layers[i].candidates[c], config.view);
  });

  if (reports) {
    reports->assign(layers.size(), {});
    for (std::size_t i = 0; i < layers.size(); ++i) (*reports)[i].resize(layers[i].candidates.size());
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto [i, c] = tasks[k];
    if (!results[k].occluded()) layers[i].costs[c] = results[k].cost;
    if (reports) (*reports)[i][c] = results[k];
  }
  return layers;
}

HorizonPlan plan_horizon(const InitialState& start, double t0, const std::vector<Pose>& predictions,
                         const SceneClouds& clouds, const PlannerConfig& config, bool relax_on_infeasible) {
  config.validate();
  if (predictions.empty()) throw std::invalid_argument("plan needs at least one prediction");
  HorizonPlan plan;
  const std::size_t n = predictions.size();
  for (std::size_t i = 0; i <= n; ++i) {
    plan.times.push_back(t0 + config.horizon * static_cast<double>(i) / static_cast<double>(n));
  }

  auto t_start = Clock::now();
  plan.layers = evaluate_view_layers(predictions, clouds, config, &plan.reports);
  plan.timings.evaluation_s = seconds_since(t_start);

  t_start = Clock::now();
  plan.r_max_used = config.effective_r_max();
  try {
    plan.dag = build_dag(start.position, plan.layers, plan.r_max_used, config.lambda);
  } catch (const InfeasiblePlan&) {
    if (!relax_on_infeasible) throw;
    plan.r_max_used *= 2.0;
    plan.dag = build_dag(start.position, plan.layers, plan.r_max_used, config.lambda);
  }
  plan.path = shortest_viewpoint_path(plan.dag);
  plan.timings.graph_s = seconds_since(t_start);

  for (std::size_t i = 0; i < plan.path.vertices.size(); ++i) {
    const auto& v = plan.dag.vertices()[plan.path.vertices[i]];
    plan.chosen_reports.push_back(plan.reports[i][v.candidate]);
  }

  t_start = Clock::now();
  const QpProblem qp = build_qp(plan.path.points, plan.times, start, config.poly_order, config.rho);
  plan.spline = solve_spline(qp);
  plan.timings.qp_s = seconds_since(t_start);
  return plan;
}

Pose actor_pose_at(const std::vector<ActorWaypoint>& path, double t) {
  if (path.empty()) throw std::invalid_argument("actor path is empty");
  if (path.size() == 1) return Pose::from_yaw(0.0, path.front().position);

  auto heading = [&](std::size_t seg) {
    // Heading of segment `seg`, falling back to earlier segments when it has no length.
    for (std::size_t s = seg + 1; s-- > 0;) {
      const Vec3 d = path[s + 1].position - path[s].position;
      if (std::hypot(d.x(), d.y()) > 1e-9) return std::atan2(d.y(), d.x());
    }
    return 0.0;
  };
  if (t <= path.front().t) return Pose::from_yaw(heading(0), path.front().position);
  if (t >= path.back().t) return Pose::from_yaw(heading(path.size() - 2), path.back().position);
  std::size_t seg = 0;
  while (seg + 2 < path.size() && t >= path[seg + 1].t) ++seg;
  const auto& a = path[seg];
  const auto& b = path[seg + 1];
  const double s = (t - a.t) / (b.t - a.t);
  return Pose::from_yaw(heading(seg), a.position + s * (b.position - a.position));
}

void Scenario::validate() const {
  if (actor_path.empty()) throw std::invalid_argument("actor_path must hold at least one waypoint");
  for (std::size_t i = 1; i < actor_path.size(); ++i) {
    if (!(actor_path[i].t > actor_path[i - 1].t)) {
      throw std::invalid_argument("actor_path timestamps must be strictly increasing");
    }
  }
  if (!(duration_s >= 0.0)) throw std::invalid_argument("duration_s must be non-negative");
  if (!(tick_hz > 0.0)) throw std::invalid_argument("tick_hz must be positive");
  if (!(observation_noise >= 0.0)) throw std::invalid_argument("observation_noise must be non-negative");
  if (!is_finite(drone_start)) throw std::invalid_argument("drone_start must be finite");
  planner.validate();
}

SceneClouds load_scene_clouds(const Scenario& scenario) {
  return {load_ply(scenario.actor_ply), load_ply(scenario.background_ply)};
}

MissionLog run_mission(const Scenario& scenario) { return run_mission(scenario, load_scene_clouds(scenario)); }

MissionLog run_mission(const Scenario& scenario, const SceneClouds& clouds) {
  scenario.validate();
  const PlannerConfig& cfg = scenario.planner;
  const double dt = 1.0 / scenario.tick_hz;
  const auto tick_count = static_cast<std::size_t>(std::llround(scenario.duration_s * scenario.tick_hz));

  MissionLog log;
  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  TargetTrack track;
  ConstantVelocityPredictor predictor;
  std::optional<SplineTrajectory> active;
  double accum = 0.0;
  std::optional<double> yaw;

  for (std::size_t k = 0; k < tick_count; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Pose truth = actor_pose_at(scenario.actor_path, t);
    Pose observed = truth;
    if (scenario.observation_noise > 0.0) {
      const Vec3 n(noise(rng), noise(rng), noise(rng));
      observed = Pose(truth.rotation(), truth.translation() + scenario.observation_noise * n);
    }
    track.add(t, observed);

    TickRecord tick;
    tick.t = t;
    tick.target = truth.translation();

    std::string trigger;
    if (!active) {
      trigger = "initial";
    } else if (accum > cfg.replan_threshold) {
      trigger = "error";
    } else if (t >= active->t_end() - 1e-9) {
      trigger = "horizon";
    }

    if (!trigger.empty()) {
      InitialState start{scenario.drone_start, Vec3::Zero(), Vec3::Zero()};
      if (active) start = {active->eval(t, 0), active->eval(t, 1), active->eval(t, 2)};

      predictor = fit_constant_velocity(track, cfg.prediction_window);
      std::vector<double> times;
      for (int i = 1; i <= cfg.steps; ++i) times.push_back(t + cfg.horizon * i / cfg.steps);
      const auto predictions = predict(predictor, times, cfg.horizon);
      HorizonPlan plan = plan_horizon(start, t, predictions, clouds, cfg, /*relax_on_infeasible=*/true);

      ReplanRecord rec;
      rec.index = log.replans.size();
      rec.t = t;
      rec.trigger = trigger;
      rec.accum_before = accum;
      accum = 0.0;
      rec.accum_after = accum;
      rec.r_max_used = plan.r_max_used;
      for (const auto& p : predictions) rec.predicted_targets.push_back(p.translation());
      rec.viewpoints = plan.path.points;
      for (const auto& r : plan.chosen_reports) {
        rec.viewpoint_r.push_back(r.variance_ratio);
        rec.viewpoint_cost.push_back(r.cost);
      }
      rec.path_cost = plan.path.total_cost;
      rec.spline_objective = plan.spline.objective;
      const auto& next = plan.spline.trajectory;
      for (int d = 0; d < 3; ++d) {
        const Vec3 before = d == 0 ? start.position : (d == 1 ? start.velocity : start.acceleration);
        rec.handoff_error = std::max(rec.handoff_error, (next.eval(t, d) - before).cwiseAbs().maxCoeff());
      }
      rec.timings = plan.timings;
      rec.trajectory = next;
      active = next;
      log.replans.push_back(std::move(rec));
      tick.replanned = true;
    }

    // Error of the active prediction at this tick, per the accumulation rule.
    const Pose predicted = predictor.pose_at(t);
    tick.prediction_error = (observed.translation() - predicted.translation()).norm();
    accum = update_accum_err(accum, observed, predicted, dt);
    tick.accum_err = accum;
    tick.active_replan = log.replans.size() - 1;

    tick.position = active->eval(t, 0);
    tick.velocity = active->eval(t, 1);
    tick.acceleration = active->eval(t, 2);
    yaw = yaw_profile(tick.position, truth.translation(), yaw);
    tick.yaw = *yaw;

    if (scenario.score_executed) {
      const auto rep = evaluate_viewpoint(truth, clouds, tick.position, cfg.view);
      tick.outcome = rep.outcome;
      tick.variance_ratio = rep.variance_ratio;
    }

    if (!log.ticks.empty()) {
      log.summary.travel_distance += (tick.position - log.ticks.back().position).norm();
    }
    log.ticks.push_back(tick);
  }

  auto& s = log.summary;
  s.ticks = log.ticks.size();
  s.replans = log.replans.size();
  if (!log.ticks.empty() && scenario.score_executed) {
    double sum = 0.0;
    for (const auto& tk : log.ticks) sum += tk.variance_ratio;
    s.mean_r = sum / static_cast<double>(log.ticks.size());
  }
  if (!log.replans.empty()) {
    for (const auto& r : log.replans) {
      s.mean_timings.evaluation_s += r.timings.evaluation_s;
      s.mean_timings.graph_s += r.timings.graph_s;
      s.mean_timings.qp_s += r.timings.qp_s;
    }
    const double nr = static_cast<double>(log.replans.size());
    s.mean_timings.evaluation_s /= nr;
    s.mean_timings.graph_s /= nr;
    s.mean_timings.qp_s /= nr;
  }
  return log;
}

std::string mission_csv(const MissionLog& log) {
  std::ostringstream os;
  os << "t,x,y,z,vx,vy,vz,ax,ay,az,yaw,target_x,target_y,target_z,prediction_error,accum_err,replanned,"
        "replan_index,outcome,R\n";
  for (const auto& tk : log.ticks) {
    os << fmt_num(tk.t);
    for (const Vec3* v : {&tk.position, &tk.velocity, &tk.acceleration}) {
      for (int a = 0; a < 3; ++a) os << ',' << fmt_num((*v)[a]);
    }
    os << ',' << fmt_num(tk.yaw);
    for (int a = 0; a < 3; ++a) os << ',' << fmt_num(tk.target[a]);
    os << ',' << fmt_num(tk.prediction_error) << ',' << fmt_num(tk.accum_err) << ',' << (tk.replanned ? 1 : 0)
       << ',' << tk.active_replan << ',' << to_string(tk.outcome) << ',' << fmt_num(tk.variance_ratio) << '\n';
  }
  return os.str();
}

std::string replans_csv(const MissionLog& log) {
  std::size_t steps = 0;
  for (const auto& r : log.replans) steps = std::max(steps, r.viewpoints.size());
  std::ostringstream os;
  os << "index,t,trigger,accum_before,accum_after,r_max,path_cost,spline_objective,handoff_error";
  for (std::size_t i = 1; i <= steps; ++i) {
    os << ",target" << i << "_x,target" << i << "_y,target" << i << "_z";
    os << ",vp" << i << "_x,vp" << i << "_y,vp" << i << "_z,vp" << i << "_R,vp" << i << "_L";
  }
  os << '\n';
  for (const auto& r : log.replans) {
    os << r.index << ',' << fmt_num(r.t) << ',' << r.trigger << ',' << fmt_num(r.accum_before) << ','
       << fmt_num(r.accum_after) << ',' << fmt_num(r.r_max_used) << ',' << fmt_num(r.path_cost) << ','
       << fmt_num(r.spline_objective) << ',' << fmt_num(r.handoff_error);
    for (std::size_t i = 0; i < steps; ++i) {
      if (i < r.viewpoints.size()) {
        for (int a = 0; a < 3; ++a) os << ',' << fmt_num(r.predicted_targets[i][a]);
        for (int a = 0; a < 3; ++a) os << ',' << fmt_num(r.viewpoints[i][a]);
        os << ',' << fmt_num(r.viewpoint_r[i]) << ',' << fmt_num(r.viewpoint_cost[i]);
      } else {
        os << ",,,,,,,,";
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string timings_csv(const MissionLog& log) {
  std::ostringstream os;
  os << "index,t,evaluation_s,graph_s,qp_s\n";
  for (const auto& r : log.replans) {
    os << r.index << ',' << fmt_num(r.t) << ',' << fmt_num(r.timings.evaluation_s) << ','
       << fmt_num(r.timings.graph_s) << ',' << fmt_num(r.timings.qp_s) << '\n';
  }
  return os.str();
}

}  // namespace chase
