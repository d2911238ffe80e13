#include "cli.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chase/error.hpp"
#include "chase/io.hpp"
#include "chase/ply.hpp"
#include "chase/pnm.hpp"
#include "chase/rhp.hpp"
#include "chase/scenario.hpp"
#include "chase/sssp_bench.hpp"

namespace chase::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad numbers in the bench-graph cross-check.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> planner_keys() {
  std::vector<std::string> keys;
  const json defaults = planner_to_json(PlannerConfig{});
  for (const auto& [k, v] : defaults.items()) keys.push_back(k);
  keys.push_back("elevation_deg");
  return keys;
}

const std::vector<std::string> kScenarioKeys{"background_ply", "actor_ply",         "actor_path",    "duration_s",
                                             "tick_hz",        "drone_start",       "observation_noise",
                                             "score_executed"};

// `--key value` flags mirroring config-file keys. Values are read as JSON
// literals, falling back to plain strings.
class Overrides {
 public:
  void add(CLI::App& app, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
      values_[key];
      options_[key] = app.add_option("--" + key, values_[key], "override of the '" + key + "' setting");
    }
  }

  json collect() const {
    json doc = json::object();
    for (const auto& [key, opt] : options_) {
      if (opt->count() == 0) continue;
      const std::string& raw = values_.at(key);
      json v;
      try {
        v = json::parse(raw);
      } catch (const json::parse_error&) {
        v = raw;
      }
      if ((key == "background_ply" || key == "actor_ply") && v.is_string()) {
        v = fs::absolute(v.get<std::string>()).string();
      }
      doc[key] = v;
    }
    return doc;
  }

  void apply(PlannerConfig& config) const {
    const json doc = collect();
    for (const auto& [key, v] : doc.items()) apply_planner_key(config, key, v);
    config.validate();
  }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

class OutputDir {
 public:
  OutputDir(fs::path dir, std::vector<fs::path>& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void text(const std::string& name, std::string_view content) {
    write_file_atomic(path(name), content);
    manifest_.push_back(path(name));
  }

  void ppm(const std::string& name, const LabeledImage& image) {
    save_ppm(path(name), image);
    manifest_.push_back(path(name));
  }

  void pgm(const std::string& name, int w, int h, const std::vector<std::uint8_t>& gray) {
    save_pgm(path(name), w, h, gray);
    manifest_.push_back(path(name));
  }

 private:
  fs::path dir_;
  std::vector<fs::path>& manifest_;
};

Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

CLI::Option* add_vec3(CLI::App& app, const std::string& name, std::vector<double>& target, const std::string& help) {
  return app.add_option(name, target, help)->expected(3)->delimiter(',')->allow_extra_args(false);
}

std::vector<std::uint8_t> likelihood_gray(const LikelihoodImage& lik, double eps) {
  const double lo = std::log(eps);
  const double hi = -lo;
  std::vector<std::uint8_t> gray(lik.values.size(), 0);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (!lik.values[i]) continue;
    const double s = std::clamp((*lik.values[i] - lo) / (hi - lo), 0.0, 1.0);
    gray[i] = static_cast<std::uint8_t>(1 + std::lround(s * 254.0));
  }
  return gray;
}

std::string histogram_csv(const std::optional<HistogramPair>& hist) {
  std::ostringstream os;
  os << "bin,center,actor,background\n";
  if (!hist) return os.str();
  for (int i = 0; i < hist->actor.bin_count(); ++i) {
    os << i << ',' << fmt_num(hist->actor.center(i)) << ',' << fmt_num(hist->actor.weight(i)) << ','
       << fmt_num(hist->background.weight(i)) << '\n';
  }
  return os.str();
}

void dump_view(OutputDir& dir, const std::string& prefix, const LabeledImage& image,
               const DetectabilityDetail& detail, double eps) {
  dir.ppm(prefix + "is.ppm", image);
  dir.pgm(prefix + "labels.pgm", image.width(), image.height(), label_map(image));
  if (detail.likelihood) {
    dir.pgm(prefix + "il.pgm", image.width(), image.height(), likelihood_gray(*detail.likelihood, eps));
  }
}

struct ViewArgs {
  std::string actor;
  std::string background;
  std::vector<double> camera;
  std::vector<double> target;
  double target_yaw = 0.0;
};

void add_view_args(CLI::App& app, ViewArgs& a) {
  app.add_option("--actor", a.actor, "actor PLY in its body frame")->required();
  app.add_option("--background", a.background, "background PLY in world frame")->required();
  add_vec3(app, "--camera", a.camera, "camera centre x,y,z")->required();
  add_vec3(app, "--target", a.target, "actor origin x,y,z")->required();
  app.add_option("--target-yaw", a.target_yaw, "actor heading, radians");
}

// ---------------------------------------------------------------------------

void cmd_eval_view(const ViewArgs& a, const Overrides& ov, const fs::path& out_dir, bool dump_images,
                   std::ostream& out, CommandOutcome& outcome) {
  PlannerConfig cfg;
  ov.apply(cfg);
  const SceneClouds clouds{load_ply(a.actor), load_ply(a.background)};
  const Pose actor_pose = Pose::from_yaw(a.target_yaw, to_vec3(a.target));
  LabeledImage image(1, 1);
  const auto detail = evaluate_viewpoint_detail(actor_pose, clouds, to_vec3(a.camera), cfg.view, &image);
  const auto& rep = detail.report;

  OutputDir dir(out_dir, outcome.files);
  if (dump_images) dump_view(dir, "", image, detail, cfg.view.detect.eps);
  dir.text("hist.csv", histogram_csv(detail.histograms));
  const double r = rep.occluded() ? -1.0 : rep.variance_ratio;
  dir.text("score.csv", "outcome,R,L,actor_pixels,background_pixels\n" + std::string(to_string(rep.outcome)) + "," +
                            fmt_num(r) + "," + fmt_num(rep.cost) + "," + std::to_string(rep.actor_pixel_count) +
                            "," + std::to_string(rep.background_pixel_count) + "\n");
  if (rep.occluded()) {
    out << "OCCLUDED\n";
  } else {
    out << "R=" << fmt_num(rep.variance_ratio) << " L=" << fmt_num(rep.cost);
    if (rep.outcome != DetectOutcome::kOk) out << ' ' << to_string(rep.outcome);
    out << '\n';
  }
}

void cmd_render(const ViewArgs& a, const Overrides& ov, const fs::path& out_dir, std::ostream& out,
                CommandOutcome& outcome) {
  PlannerConfig cfg;
  ov.apply(cfg);
  const SceneClouds clouds{load_ply(a.actor), load_ply(a.background)};
  const Pose actor_pose = Pose::from_yaw(a.target_yaw, to_vec3(a.target));
  const Pose camera = look_at_pose(to_vec3(a.camera), actor_pose.translation());
  const LabeledImage image = synthesize_view(transform_cloud(clouds.actor, actor_pose), clouds.background, camera,
                                             cfg.view.intrinsics, cfg.view.render);
  OutputDir dir(out_dir, outcome.files);
  dir.ppm("render.ppm", image);
  dir.pgm("labels.pgm", image.width(), image.height(), label_map(image));
  out << "actor_pixels=" << image.count(PixelLabel::kActor)
      << " background_pixels=" << image.count(PixelLabel::kBackground)
      << " empty_pixels=" << image.count(PixelLabel::kEmpty) << '\n';
}

// Piecewise-linear interpolation through the predicted targets, extended
// linearly before the first one.
Vec3 predicted_target_at(const std::vector<double>& times, const std::vector<Pose>& predictions, double t) {
  const std::size_t n = predictions.size();
  if (n == 1) return predictions[0].translation();
  std::size_t seg = 0;  // between predictions[seg] and predictions[seg + 1]
  while (seg + 2 < n && t > times[seg + 2]) ++seg;
  const double ta = times[seg + 1];
  const double tb = times[seg + 2];
  const Vec3& pa = predictions[seg].translation();
  const Vec3& pb = predictions[seg + 1].translation();
  return pa + (t - ta) / (tb - ta) * (pb - pa);
}

void cmd_plan(const std::string& request_path, const Overrides& ov, const fs::path& out_dir, bool write_dag,
              std::ostream& out, CommandOutcome& outcome) {
  const PlanRequest req = load_plan_request(request_path, ov.collect());
  const SceneClouds clouds{load_ply(req.actor_ply), load_ply(req.background_ply)};
  const HorizonPlan plan = plan_horizon(req.drone, req.t0, req.predictions, clouds, req.planner, false);

  OutputDir dir(out_dir, outcome.files);
  std::ostringstream vp;
  vp << "step,t,target_x,target_y,target_z,x,y,z,outcome,R,L\n";
  for (std::size_t i = 0; i < plan.path.points.size(); ++i) {
    const auto& p = plan.path.points[i];
    const auto& tg = req.predictions[i].translation();
    const auto& rep = plan.chosen_reports[i];
    vp << i + 1 << ',' << fmt_num(plan.times[i + 1]) << ',' << fmt_num(tg.x()) << ',' << fmt_num(tg.y()) << ','
       << fmt_num(tg.z()) << ',' << fmt_num(p.x()) << ',' << fmt_num(p.y()) << ',' << fmt_num(p.z()) << ','
       << to_string(rep.outcome) << ',' << fmt_num(rep.variance_ratio) << ',' << fmt_num(rep.cost) << '\n';
  }
  dir.text("viewpoints.csv", vp.str());

  const auto& traj = plan.spline.trajectory;
  constexpr double kSampleDt = 0.02;
  const auto samples = static_cast<long>(std::llround((traj.t_end() - traj.t_begin()) / kSampleDt));
  std::ostringstream tr;
  tr << "t,x,y,z,yaw,vx,vy,vz,ax,ay,az\n";
  std::optional<double> yaw;
  for (long k = 0; k <= samples; ++k) {
    const double t = std::min(traj.t_begin() + static_cast<double>(k) * kSampleDt, traj.t_end());
    const Vec3 p = traj.eval(t, 0);
    yaw = yaw_profile(p, predicted_target_at(plan.times, req.predictions, t), yaw);
    tr << fmt_num(t);
    for (int a = 0; a < 3; ++a) tr << ',' << fmt_num(p[a]);
    tr << ',' << fmt_num(*yaw);
    for (int d = 1; d <= 2; ++d) {
      const Vec3 v = traj.eval(t, d);
      for (int a = 0; a < 3; ++a) tr << ',' << fmt_num(v[a]);
    }
    tr << '\n';
  }
  dir.text("trajectory.csv", tr.str());

  if (write_dag) {
    const auto& dag = plan.dag;
    std::ostringstream os;
    auto candidate = [&](std::uint32_t v) { return dag.vertices().empty() ? 0 : dag.vertices()[v].candidate; };
    for (const auto& e : dag.edges()) {
      os << dag.layer_of(e.from) << ' ' << candidate(e.from) << ' ' << dag.layer_of(e.to) << ' ' << candidate(e.to)
         << ' ' << fmt_num(e.weight) << '\n';
    }
    dir.text("dag.txt", os.str());
  }
  out << "viewpoints=" << plan.path.points.size() << " path_cost=" << fmt_num(plan.path.total_cost)
      << " spline_objective=" << fmt_num(plan.spline.objective) << '\n';
}

void cmd_simulate(const std::string& scenario_path, const Overrides& ov, std::optional<std::uint64_t> seed,
                  const fs::path& out_dir, bool dump_images, std::ostream& out, CommandOutcome& outcome) {
  json overrides = ov.collect();
  if (seed) overrides["seed"] = *seed;
  Scenario scenario = load_scenario(scenario_path, overrides);
  scenario.background_ply = fs::absolute(scenario.background_ply);
  scenario.actor_ply = fs::absolute(scenario.actor_ply);
  const SceneClouds clouds = load_scene_clouds(scenario);
  const MissionLog log = run_mission(scenario, clouds);

  OutputDir dir(out_dir, outcome.files);
  dir.text("effective_scenario.json", scenario_to_json(scenario).dump(2) + "\n");
  dir.text("mission.csv", mission_csv(log));
  dir.text("replans.csv", replans_csv(log));
  dir.text("timings.csv", timings_csv(log));
  if (dump_images) {
    for (const auto& r : log.replans) {
      const auto& tick = log.ticks[static_cast<std::size_t>(std::llround(r.t * scenario.tick_hz))];
      LabeledImage image(1, 1);
      const Pose actor = actor_pose_at(scenario.actor_path, r.t);
      const auto detail = evaluate_viewpoint_detail(actor, clouds, tick.position, scenario.planner.view, &image);
      char prefix[32];
      std::snprintf(prefix, sizeof prefix, "replan_%04zu_", r.index);
      dump_view(dir, prefix, image, detail, scenario.planner.view.detect.eps);
    }
  }

  const auto& s = log.summary;
  out << "ticks " << s.ticks << '\n'
      << "replans " << s.replans << '\n'
      << "travel_distance_m " << fmt_num(s.travel_distance) << '\n'
      << "mean_R " << fmt_num(s.mean_r) << '\n'
      << "mean_evaluation_ms " << fmt_num(s.mean_timings.evaluation_s * 1e3) << '\n'
      << "mean_graph_ms " << fmt_num(s.mean_timings.graph_s * 1e3) << '\n'
      << "mean_qp_ms " << fmt_num(s.mean_timings.qp_s * 1e3) << '\n';
}

void cmd_bench_graph(const std::vector<std::size_t>& sizes, std::size_t width, int trials, std::uint64_t seed,
                     const fs::path& out_dir, std::ostream& out, CommandOutcome& outcome) {
  constexpr std::size_t kMaxEdges = 100'000'000;
  if (sizes.empty()) throw UsageError("--sizes needs at least one edge count");
  if (width < 1) throw UsageError("--width must be positive");
  if (trials < 1) throw UsageError("--trials must be positive");
  for (std::size_t e : sizes) {
    if (e < width || e > kMaxEdges) {
      throw UsageError("edge count " + std::to_string(e) + " outside [" + std::to_string(width) + ", " +
                       std::to_string(kMaxEdges) + "]");
    }
  }
  std::ostringstream os;
  os << "edges,backend,seconds\n";
  for (std::size_t e : sizes) {
    const auto rows = bench_sssp(layers_for_edges(e, width), width, trials, seed);
    const double a = rows[0].best_cost;
    const double b = rows[1].best_cost;
    if (!(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)))) {
      throw DataError("backend costs differ at " + std::to_string(rows[0].edges) + " edges: " + fmt_num(a) +
                      " vs " + fmt_num(b));
    }
    for (const auto& r : rows) {
      os << r.edges << ',' << r.backend << ',' << fmt_num(r.seconds) << '\n';
      out << r.edges << ' ' << r.backend << ' ' << fmt_num(r.seconds) << '\n';
    }
  }
  OutputDir dir(out_dir, outcome.files);
  dir.text("bench_graph.csv", os.str());
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return s;
}

CommandOutcome fail(std::ostream& err, int code, const std::string& message) {
  static const char* kinds[] = {"ok", "usage", "data", "infeasible"};
  err << "error code=" << code << " kind=" << kinds[code] << " message=\"" << one_line(message) << "\"\n";
  return {code, {}};
}

}  // namespace

CommandOutcome run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detectability-aware drone chasing: view evaluation, planning and simulation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::string out_dir = ".";
  const auto pkeys = planner_keys();

  auto* eval = app.add_subcommand("eval-view", "score one camera viewpoint");
  ViewArgs eval_args;
  bool eval_dump = true;
  Overrides eval_ov;
  add_view_args(*eval, eval_args);
  eval->add_option("--dump-images", eval_dump, "write is.ppm, il.pgm and labels.pgm");
  eval->add_option("--out-dir", out_dir, "output directory");
  eval_ov.add(*eval, pkeys);

  auto* render = app.add_subcommand("render", "render the labelled view only");
  ViewArgs render_args;
  Overrides render_ov;
  add_view_args(*render, render_args);
  render->add_option("--out-dir", out_dir, "output directory");
  render_ov.add(*render, pkeys);

  auto* plan = app.add_subcommand("plan", "plan one horizon from a request file");
  std::string request;
  bool plan_dag = false;
  Overrides plan_ov;
  plan->add_option("request", request, "plan request JSON")->required();
  plan->add_flag("--dag", plan_dag, "also write the DAG edge list");
  plan->add_option("--out-dir", out_dir, "output directory");
  std::vector<std::string> plan_keys{"background_ply", "actor_ply"};
  for (const auto& k : pkeys) {
    if (k != "steps") plan_keys.push_back(k);
  }
  plan_ov.add(*plan, plan_keys);

  auto* sim = app.add_subcommand("simulate", "run a full receding-horizon mission");
  std::string scenario;
  std::optional<std::uint64_t> seed;
  bool sim_dump = false;
  Overrides sim_ov;
  sim->add_option("scenario", scenario, "scenario JSON")->required();
  sim->add_option("--seed", seed, "observation noise seed");
  sim->add_option("--dump-images", sim_dump, "write the executed view at every replan");
  sim->add_option("--out-dir", out_dir, "output directory");
  std::vector<std::string> sim_keys = kScenarioKeys;
  sim_keys.insert(sim_keys.end(), pkeys.begin(), pkeys.end());
  sim_ov.add(*sim, sim_keys);

  auto* bench = app.add_subcommand("bench-graph", "time both SSSP backends over a size sweep");
  std::vector<std::size_t> sizes{1'000, 10'000, 100'000, 1'000'000};
  std::size_t width = 32;
  int trials = 3;
  std::uint64_t bench_seed = 1;
  bench->add_option("--sizes", sizes, "edge counts")->delimiter(',');
  bench->add_option("--width", width, "vertices per layer");
  bench->add_option("--trials", trials, "timed trials per size");
  bench->add_option("--seed", bench_seed, "edge weight seed");
  bench->add_option("--out-dir", out_dir, "output directory");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("chase");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return {kOk, {}};
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return {kOk, {}};
  } catch (const CLI::ParseError& e) {
    return fail(err, kUsage, e.what());
  }

  CommandOutcome outcome;
  try {
    if (eval->parsed()) {
      cmd_eval_view(eval_args, eval_ov, out_dir, eval_dump, out, outcome);
    } else if (render->parsed()) {
      cmd_render(render_args, render_ov, out_dir, out, outcome);
    } else if (plan->parsed()) {
      cmd_plan(request, plan_ov, out_dir, plan_dag, out, outcome);
    } else if (sim->parsed()) {
      cmd_simulate(scenario, sim_ov, seed, out_dir, sim_dump, out, outcome);
    } else if (bench->parsed()) {
      cmd_bench_graph(sizes, width, trials, bench_seed, out_dir, out, outcome);
    }
  } catch (const UsageError& e) {
    return fail(err, kUsage, e.what());
  } catch (const InfeasiblePlan& e) {
    return fail(err, kInfeasible, e.what());
  } catch (const std::exception& e) {
    return fail(err, kDataError, e.what());
  }
  return outcome;
}

}  // namespace chase::cli
