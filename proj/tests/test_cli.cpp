#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "chase/io.hpp"
#include "chase/ply.hpp"
#include "chase/rhp.hpp"
#include "chase/scenario.hpp"
#include "chase/scenes.hpp"
#include "cli.hpp"

using namespace chase;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  cli::CommandOutcome outcome;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.outcome = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string vec(const Vec3& v) {
  std::ostringstream os;
  os.precision(17);
  os << v.x() << ',' << v.y() << ',' << v.z();
  return os.str();
}

// Scratch directory with the street and two-camera clouds written as PLY.
struct Workspace {
  fs::path dir;
  TwoCameraScene two = make_two_camera_scene(13);

  Workspace() {
    dir = fs::temp_directory_path() / "chase_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    save_ply(dir / "ped.ply", make_pedestrian(11));
    save_ply(dir / "street.ply", make_street_background(12));
    save_ply(dir / "box.ply", two.clouds.actor);
    save_ply(dir / "walls.ply", two.clouds.background);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write_request(const std::string& name, int count, const json& extra = json::object()) const {
    json doc = {{"background_ply", "street.ply"},
                {"actor_ply", "ped.ply"},
                {"t0", 0.0},
                {"drone", {{"position", {-30.0, 4.7, 2.6}}, {"velocity", {0.0, 0.0, 0.0}}}}};
    json preds = json::array();
    for (int i = 1; i <= count; ++i) preds.push_back({-30.0 + 1.1 * i, 0.0, 0.9, 0.0});
    doc["predictions"] = preds;
    doc["horizon_s"] = static_cast<double>(count);
    doc.update(extra);
    write_file_atomic(dir / name, doc.dump());
    return dir / name;
  }

  fs::path write_scenario(const std::string& name, double duration) const {
    Scenario s = make_street_scenario(dir / "ped.ply", dir / "street.ply");
    s.duration_s = duration;
    s.observation_noise = 0.05;
    write_file_atomic(dir / name, scenario_to_json(s).dump());
    return dir / name;
  }
};

Workspace& workspace() {
  static Workspace ws;
  return ws;
}

}  // namespace

TEST_CASE("usage errors") {
  auto r = run({});
  CHECK(r.outcome.exit_code == cli::kUsage);
  CHECK(r.err.rfind("error code=1 kind=usage message=", 0) == 0);
  CHECK(run({"fly"}).outcome.exit_code == cli::kUsage);
  CHECK(run({"eval-view", "--actor", "a.ply"}).outcome.exit_code == cli::kUsage);
  CHECK(run({"--help"}).outcome.exit_code == cli::kOk);
}

TEST_CASE("eval-view ranks the contrasting background higher") {
  auto& ws = workspace();
  auto score = [&](const Vec3& cam, const std::string& sub) {
    const auto out = ws.dir / sub;
    const auto r = run({"eval-view", "--actor", (ws.dir / "box.ply").string(), "--background",
                        (ws.dir / "walls.ply").string(), "--camera", vec(cam), "--target",
                        vec(ws.two.actor_pose.translation()), "--out-dir", out.string()});
    REQUIRE(r.outcome.exit_code == cli::kOk);
    CHECK(r.outcome.files.size() == 5);
    const auto rows = read_csv(out / "score.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "OK");
    return std::stod(rows[1][1]);
  };
  const double distinct = score(ws.two.camera_distinct, "cam1");
  const double ambiguous = score(ws.two.camera_ambiguous, "cam2");
  CHECK(distinct > ambiguous);
  CHECK(fs::exists(ws.dir / "cam1" / "is.ppm"));
  CHECK(fs::exists(ws.dir / "cam1" / "il.pgm"));
  CHECK(fs::exists(ws.dir / "cam1" / "hist.csv"));
}

TEST_CASE("eval-view without images and with a missing file") {
  auto& ws = workspace();
  const auto out = ws.dir / "noimg";
  auto r = run({"eval-view", "--actor", (ws.dir / "box.ply").string(), "--background", (ws.dir / "walls.ply").string(),
                "--camera", vec(ws.two.camera_distinct), "--target", "0,0,0.3", "--dump-images", "false",
                "--out-dir", out.string()});
  REQUIRE(r.outcome.exit_code == cli::kOk);
  for (const auto& f : r.outcome.files) CHECK(f.extension() == ".csv");
  CHECK(!fs::exists(out / "is.ppm"));

  r = run({"eval-view", "--actor", (ws.dir / "nope.ply").string(), "--background", (ws.dir / "walls.ply").string(),
           "--camera", "0,4,1.5", "--target", "0,0,0.3", "--out-dir", out.string()});
  CHECK(r.outcome.exit_code == cli::kDataError);
  CHECK(r.err.rfind("error code=2 kind=data", 0) == 0);
  CHECK(r.outcome.files.empty());

  r = run({"eval-view", "--actor", (ws.dir / "box.ply").string(), "--background", (ws.dir / "walls.ply").string(),
           "--camera", "0,4,1.5", "--target", "0,0,0.3", "--hist_bins", "0", "--out-dir", out.string()});
  CHECK(r.outcome.exit_code != cli::kOk);
}

TEST_CASE("render writes the labelled view") {
  auto& ws = workspace();
  const auto out = ws.dir / "render";
  const auto r = run({"render", "--actor", (ws.dir / "box.ply").string(), "--background",
                      (ws.dir / "walls.ply").string(), "--camera", "0,4,1.5", "--target", "0,0,0.3", "--out-dir",
                      out.string()});
  REQUIRE(r.outcome.exit_code == cli::kOk);
  CHECK(fs::exists(out / "render.ppm"));
  CHECK(fs::exists(out / "labels.pgm"));
}

TEST_CASE("plan writes one viewpoint per prediction and a trajectory") {
  auto& ws = workspace();
  const auto req = ws.write_request("plan6.json", 6);
  const auto out = ws.dir / "plan6";
  const auto r = run({"plan", req.string(), "--dag", "--out-dir", out.string()});
  REQUIRE_MESSAGE(r.outcome.exit_code == cli::kOk, r.err);
  const auto vp = read_csv(out / "viewpoints.csv");
  CHECK(vp.size() == 7);
  const auto tr = read_csv(out / "trajectory.csv");
  CHECK(tr.size() == 1 + 301);
  CHECK(tr[0].size() == 11);
  CHECK(std::abs(std::stod(tr.back()[0]) - 6.0) < 1e-12);
  CHECK(fs::exists(out / "dag.txt"));
}

TEST_CASE("plan with lambda 0 matches an exhaustive search over candidates") {
  auto& ws = workspace();
  const auto req = ws.write_request("plan0.json", 5, {{"lambda", 0.0}});
  const auto out = ws.dir / "plan0";
  const auto r = run({"plan", req.string(), "--out-dir", out.string()});
  REQUIRE_MESSAGE(r.outcome.exit_code == cli::kOk, r.err);
  const auto vp = read_csv(out / "viewpoints.csv");
  double planned = 0.0;
  Vec3 prev(-30.0, 4.7, 2.6);
  for (std::size_t i = 1; i < vp.size(); ++i) {
    const Vec3 p(std::stod(vp[i][5]), std::stod(vp[i][6]), std::stod(vp[i][7]));
    planned += (p - prev).norm();
    prev = p;
  }

  // Candidates and their occlusion state, searched with no graph at all.
  const SceneClouds clouds{load_ply(ws.dir / "ped.ply"), load_ply(ws.dir / "street.ply")};
  std::vector<Pose> preds;
  for (int i = 1; i <= 5; ++i) preds.push_back(Pose::from_yaw(0.0, Vec3(-30.0 + 1.1 * i, 0.0, 0.9)));
  PlannerConfig cfg;
  cfg.lambda = 0.0;
  cfg.steps = 5;
  cfg.horizon = 5.0;
  const auto layers = evaluate_view_layers(preds, clouds, cfg);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, const Vec3&, double)> search = [&](std::size_t layer, const Vec3& from, double cost) {
    if (layer == layers.size()) {
      best = std::min(best, cost);
      return;
    }
    for (std::size_t j = 0; j < layers[layer].candidates.size(); ++j) {
      if (!layers[layer].costs[j]) continue;
      const double step = (layers[layer].candidates[j] - from).norm();
      if (step > cfg.effective_r_max()) continue;
      search(layer + 1, layers[layer].candidates[j], cost + step);
    }
  };
  search(0, Vec3(-30.0, 4.7, 2.6), 0.0);
  REQUIRE(std::isfinite(best));
  CHECK(std::abs(planned - best) <= 1e-9 * std::max(1.0, best));
}

TEST_CASE("plan with an unreachable r_max is infeasible") {
  auto& ws = workspace();
  const auto req = ws.write_request("plan_tight.json", 4);
  const auto r = run({"plan", req.string(), "--r_max", "0.1", "--out-dir", (ws.dir / "tight").string()});
  CHECK(r.outcome.exit_code == cli::kInfeasible);
  CHECK(r.err.rfind("error code=3 kind=infeasible", 0) == 0);
  CHECK(r.outcome.files.empty());
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  auto& ws = workspace();
  const auto sc = ws.write_scenario("sim.json", 8.0);
  const auto a = run({"simulate", sc.string(), "--seed", "7", "--out-dir", (ws.dir / "simA").string()});
  const auto b = run({"simulate", sc.string(), "--seed", "7", "--out-dir", (ws.dir / "simB").string()});
  REQUIRE_MESSAGE(a.outcome.exit_code == cli::kOk, a.err);
  REQUIRE(b.outcome.exit_code == cli::kOk);
  for (const char* f : {"mission.csv", "replans.csv"}) {
    CHECK(read_file(ws.dir / "simA" / f) == read_file(ws.dir / "simB" / f));
  }
  CHECK(read_csv(ws.dir / "simA" / "mission.csv").size() == 1 + 160);
  CHECK(a.out.find("replans ") != std::string::npos);

  const auto c = run({"simulate", sc.string(), "--seed", "8", "--out-dir", (ws.dir / "simC").string()});
  REQUIRE(c.outcome.exit_code == cli::kOk);
  CHECK(read_file(ws.dir / "simA" / "mission.csv") != read_file(ws.dir / "simC" / "mission.csv"));
}

TEST_CASE("simulate with zero duration writes header-only logs") {
  auto& ws = workspace();
  const auto sc = ws.write_scenario("sim0.json", 0.0);
  const auto out = ws.dir / "sim0";
  const auto r = run({"simulate", sc.string(), "--out-dir", out.string()});
  REQUIRE_MESSAGE(r.outcome.exit_code == cli::kOk, r.err);
  CHECK(read_csv(out / "mission.csv").size() == 1);
  CHECK(read_csv(out / "replans.csv").size() == 1);
}

TEST_CASE("simulate rejects unknown override values") {
  auto& ws = workspace();
  const auto sc = ws.write_scenario("sim_bad.json", 1.0);
  const auto r = run({"simulate", sc.string(), "--lambda", "\"x\"", "--out-dir", (ws.dir / "bad").string()});
  CHECK(r.outcome.exit_code == cli::kDataError);
}

TEST_CASE("bench-graph") {
  auto& ws = workspace();
  const auto out = ws.dir / "bench";
  auto r = run({"bench-graph", "--sizes", "2000", "--trials", "1", "--out-dir", out.string()});
  REQUIRE_MESSAGE(r.outcome.exit_code == cli::kOk, r.err);
  const auto rows = read_csv(out / "bench_graph.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"edges", "backend", "seconds"});
  CHECK(rows[1][1] != rows[2][1]);

  CHECK(run({"bench-graph", "--sizes", "5", "--out-dir", out.string()}).outcome.exit_code == cli::kUsage);
  CHECK(run({"bench-graph", "--sizes", "1000000000", "--out-dir", out.string()}).outcome.exit_code == cli::kUsage);
  CHECK(run({"bench-graph", "--sizes", "abc", "--out-dir", out.string()}).outcome.exit_code == cli::kUsage);
}
