#include "chase/scenario.hpp"

#include <cmath>
#include <fstream>

#include "chase/error.hpp"

namespace chase {

using nlohmann::json;

namespace {

constexpr double kDegToRad = M_PI / 180.0;

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) throw ParseError("key '" + key + "' must be a number");
  return v.get<double>();
}

double as_positive(const std::string& key, const json& v) {
  const double x = as_number(key, v);
  if (!(x > 0.0)) throw ParseError("key '" + key + "' must be positive");
  return x;
}

long long as_integer(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ParseError("key '" + key + "' must be an integer");
  return v.get<long long>();
}

Vec3 as_vec3(const std::string& key, const json& v) {
  if (!v.is_array() || v.size() != 3) throw ParseError("key '" + key + "' must be [x, y, z]");
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = as_number(key, v[static_cast<std::size_t>(a)]);
  return out;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::filesystem::path resolve(const std::filesystem::path& base, const json& v, const std::string& key) {
  if (!v.is_string()) throw ParseError("key '" + key + "' must be a path string");
  std::filesystem::path p = v.get<std::string>();
  return p.is_absolute() || base.empty() ? p : base / p;
}

double hfov_of(const CameraIntrinsics& k) { return 2.0 * std::atan(0.5 * k.width / k.fx); }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

bool apply_planner_key(PlannerConfig& c, const std::string& key, const json& v) {
  auto& k = c.view.intrinsics;
  auto& d = c.view.detect;
  if (key == "horizon_s") {
    c.horizon = as_positive(key, v);
  } else if (key == "steps") {
    c.steps = static_cast<int>(as_integer(key, v));
  } else if (key == "lambda") {
    c.lambda = as_number(key, v);
  } else if (key == "r_d") {
    c.r_d = as_positive(key, v);
  } else if (key == "r_max") {
    if (v.is_null()) {
      c.r_max.reset();
    } else {
      c.r_max = as_positive(key, v);
    }
  } else if (key == "azimuth_count") {
    c.azimuth_count = static_cast<int>(as_integer(key, v));
  } else if (key == "elevation_deg") {
    c.elevations_deg = {as_number(key, v)};
  } else if (key == "elevations_deg") {
    if (!v.is_array() || v.empty()) throw ParseError("key 'elevations_deg' must be a non-empty list");
    c.elevations_deg.clear();
    for (const auto& e : v) c.elevations_deg.push_back(as_number(key, e));
  } else if (key == "min_elevation_deg") {
    c.min_elevation_deg = as_number(key, v);
  } else if (key == "poly_order") {
    c.poly_order = static_cast<int>(as_integer(key, v));
  } else if (key == "rho") {
    c.rho = as_positive(key, v);
  } else if (key == "replan_threshold") {
    c.replan_threshold = as_positive(key, v);
  } else if (key == "prediction_window") {
    const auto w = as_integer(key, v);
    if (w < 1) throw ParseError("key 'prediction_window' must be >= 1");
    c.prediction_window = static_cast<std::size_t>(w);
  } else if (key == "image_width" || key == "image_height" || key == "fov_deg" || key == "near_clip") {
    int width = k.width;
    int height = k.height;
    double hfov = hfov_of(k);
    double near = k.near_clip;
    if (key == "image_width") width = static_cast<int>(as_integer(key, v));
    if (key == "image_height") height = static_cast<int>(as_integer(key, v));
    if (key == "fov_deg") hfov = as_positive(key, v) * kDegToRad;
    if (key == "near_clip") near = as_positive(key, v);
    try {
      k = CameraIntrinsics::from_fov(width, height, hfov, near);
    } catch (const std::invalid_argument& e) {
      throw ParseError("key '" + key + "': " + e.what());
    }
  } else if (key == "splat_radius") {
    c.view.render.splat_radius = static_cast<int>(as_integer(key, v));
  } else if (key == "clear_color") {
    if (!v.is_array() || v.size() != 3) throw ParseError("key 'clear_color' must be [r, g, b]");
    std::array<std::uint8_t, 3> rgb{};
    for (std::size_t a = 0; a < 3; ++a) {
      const auto x = as_integer(key, v[a]);
      if (x < 0 || x > 255) throw ParseError("key 'clear_color' channels must lie in [0, 255]");
      rgb[a] = static_cast<std::uint8_t>(x);
    }
    c.view.render.clear_color = {rgb[0], rgb[1], rgb[2]};
  } else if (key == "bins_per_channel") {
    d.bins_per_channel = static_cast<int>(as_integer(key, v));
  } else if (key == "hist_bins") {
    d.hist_bins = static_cast<int>(as_integer(key, v));
  } else if (key == "eps") {
    d.eps = as_positive(key, v);
  } else if (key == "eps_den") {
    d.eps_den = as_positive(key, v);
  } else if (key == "eps_r") {
    d.eps_r = as_positive(key, v);
  } else if (key == "w_max") {
    d.w_max = as_number(key, v);
  } else if (key == "d_c") {
    if (v.is_null()) {
      d.d_c.reset();
    } else {
      d.d_c = as_positive(key, v);
    }
  } else if (key == "threads") {
    c.threads = static_cast<int>(as_integer(key, v));
  } else {
    return false;
  }
  return true;
}

json planner_to_json(const PlannerConfig& c) {
  const auto& k = c.view.intrinsics;
  const auto& d = c.view.detect;
  const auto& cc = c.view.render.clear_color;
  return json{
      {"horizon_s", c.horizon},
      {"steps", c.steps},
      {"lambda", c.lambda},
      {"r_d", c.r_d},
      {"r_max", c.r_max ? json(*c.r_max) : json(nullptr)},
      {"azimuth_count", c.azimuth_count},
      {"elevations_deg", c.elevations_deg},
      {"min_elevation_deg", c.min_elevation_deg},
      {"poly_order", c.poly_order},
      {"rho", c.rho},
      {"replan_threshold", c.replan_threshold},
      {"prediction_window", c.prediction_window},
      {"image_width", k.width},
      {"image_height", k.height},
      {"fov_deg", hfov_of(k) / kDegToRad},
      {"near_clip", k.near_clip},
      {"splat_radius", c.view.render.splat_radius},
      {"clear_color", json::array({cc.r, cc.g, cc.b})},
      {"bins_per_channel", d.bins_per_channel},
      {"hist_bins", d.hist_bins},
      {"eps", d.eps},
      {"eps_den", d.eps_den},
      {"eps_r", d.eps_r},
      {"w_max", d.w_max},
      {"d_c", d.d_c ? json(*d.d_c) : json(nullptr)},
      {"threads", c.threads},
  };
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  Scenario s;
  bool have_bg = false;
  bool have_actor = false;
  bool have_path = false;
  for (const auto& [key, v] : doc.items()) {
    if (key == "background_ply") {
      s.background_ply = resolve(base_dir, v, key);
      have_bg = true;
    } else if (key == "actor_ply") {
      s.actor_ply = resolve(base_dir, v, key);
      have_actor = true;
    } else if (key == "actor_path") {
      if (!v.is_array()) throw ParseError("key 'actor_path' must be a list of [t, x, y, z]");
      for (const auto& row : v) {
        if (!row.is_array() || row.size() != 4) throw ParseError("actor_path rows must be [t, x, y, z]");
        s.actor_path.push_back({as_number(key, row[0]),
                                Vec3(as_number(key, row[1]), as_number(key, row[2]), as_number(key, row[3]))});
      }
      have_path = true;
    } else if (key == "duration_s") {
      s.duration_s = as_number(key, v);
    } else if (key == "tick_hz") {
      s.tick_hz = as_positive(key, v);
    } else if (key == "drone_start") {
      s.drone_start = as_vec3(key, v);
    } else if (key == "observation_noise") {
      s.observation_noise = as_number(key, v);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !v.is_number_integer()) throw ParseError("key 'seed' must be an integer");
      s.seed = v.get<std::uint64_t>();
    } else if (key == "score_executed") {
      if (!v.is_boolean()) throw ParseError("key 'score_executed' must be a boolean");
      s.score_executed = v.get<bool>();
    } else if (!apply_planner_key(s.planner, key, v)) {
      throw ParseError("unknown scenario key '" + key + "'");
    }
  }
  if (!have_bg) throw ParseError("scenario is missing 'background_ply'");
  if (!have_actor) throw ParseError("scenario is missing 'actor_ply'");
  if (!have_path) throw ParseError("scenario is missing 'actor_path'");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid scenario: ") + e.what());
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json doc = planner_to_json(s.planner);
  doc["background_ply"] = s.background_ply.string();
  doc["actor_ply"] = s.actor_ply.string();
  json path = json::array();
  for (const auto& w : s.actor_path) path.push_back({w.t, w.position.x(), w.position.y(), w.position.z()});
  doc["actor_path"] = path;
  doc["duration_s"] = s.duration_s;
  doc["tick_hz"] = s.tick_hz;
  doc["drone_start"] = vec3_json(s.drone_start);
  doc["observation_noise"] = s.observation_noise;
  doc["seed"] = s.seed;
  doc["score_executed"] = s.score_executed;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path, const json& overrides) {
  json doc = read_json_file(path);
  if (!doc.is_object()) throw ParseError(path.string() + ": scenario must be a JSON object");
  for (const auto& [key, v] : overrides.items()) doc[key] = v;
  return scenario_from_json(doc, path.parent_path());
}

PlanRequest plan_request_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("plan request must be a JSON object");
  PlanRequest req;
  bool have_bg = false;
  bool have_actor = false;
  bool have_pred = false;
  bool have_drone = false;
  for (const auto& [key, v] : doc.items()) {
    if (key == "background_ply") {
      req.background_ply = resolve(base_dir, v, key);
      have_bg = true;
    } else if (key == "actor_ply") {
      req.actor_ply = resolve(base_dir, v, key);
      have_actor = true;
    } else if (key == "t0") {
      req.t0 = as_number(key, v);
    } else if (key == "drone") {
      if (!v.is_object() || !v.contains("position")) throw ParseError("key 'drone' needs a 'position'");
      for (const auto& [dk, dv] : v.items()) {
        if (dk == "position") {
          req.drone.position = as_vec3("drone.position", dv);
        } else if (dk == "velocity") {
          req.drone.velocity = as_vec3("drone.velocity", dv);
        } else if (dk == "acceleration") {
          req.drone.acceleration = as_vec3("drone.acceleration", dv);
        } else {
          throw ParseError("unknown drone key '" + dk + "'");
        }
      }
      have_drone = true;
    } else if (key == "predictions") {
      if (!v.is_array() || v.empty()) throw ParseError("key 'predictions' must be a non-empty list");
      for (const auto& row : v) {
        if (!row.is_array() || (row.size() != 3 && row.size() != 4)) {
          throw ParseError("prediction rows must be [x, y, z] or [x, y, z, yaw]");
        }
        const Vec3 p(as_number(key, row[0]), as_number(key, row[1]), as_number(key, row[2]));
        const double yaw = row.size() == 4 ? as_number(key, row[3]) : 0.0;
        req.predictions.push_back(Pose::from_yaw(yaw, p));
      }
      have_pred = true;
    } else if (key == "steps") {
      // Derived from the prediction count.
    } else if (!apply_planner_key(req.planner, key, v)) {
      throw ParseError("unknown plan key '" + key + "'");
    }
  }
  if (!have_bg) throw ParseError("plan request is missing 'background_ply'");
  if (!have_actor) throw ParseError("plan request is missing 'actor_ply'");
  if (!have_drone) throw ParseError("plan request is missing 'drone'");
  if (!have_pred) throw ParseError("plan request is missing 'predictions'");
  req.planner.steps = static_cast<int>(req.predictions.size());
  try {
    req.planner.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid plan request: ") + e.what());
  }
  return req;
}

PlanRequest load_plan_request(const std::filesystem::path& path, const json& overrides) {
  json doc = read_json_file(path);
  if (!doc.is_object()) throw ParseError(path.string() + ": plan request must be a JSON object");
  for (const auto& [key, v] : overrides.items()) doc[key] = v;
  return plan_request_from_json(doc, path.parent_path());
}

}  // namespace chase
