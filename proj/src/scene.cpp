#include "pickplan/scene.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "pickplan/error.hpp"

namespace pickplan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw PlanError(ErrorCode::SceneError, msg, Stage::Scene); }

// Unknown keys are rejected so a misspelled unit suffix cannot silently fall back to a default.
void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail("unknown key '" + key + "' in " + std::string(where));
  }
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(std::string("'") + key + "' must be finite");
  return x;
}

void read_opt(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = number(j, key);
}

void read_opt(const json& j, const char* key, int& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  out = j.at(key).get<int>();
}

Vec3 vec3_value(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) fail("'" + what + "' must be a 3-element array");
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    if (!v[k].is_number()) fail("'" + what + "' must contain numbers");
    out[k] = v[k].get<double>();
    if (!std::isfinite(out[k])) fail("'" + what + "' must be finite");
  }
  return out;
}

Vec3 vec3_field(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing '") + key + "'");
  return vec3_value(j.at(key), key);
}

Aabb box(const json& j, const std::string& what) {
  check_keys(j, what, {"min", "max"});
  const Vec3 lo = vec3_field(j, "min"), hi = vec3_field(j, "max");
  if ((lo.array() > hi.array()).any()) fail("'" + what + "' has min > max");
  return {lo, hi};
}

GridMap3D parse_grid(const json& j) {
  check_keys(j, "grid", {"origin_m", "cell_size_m", "dims", "occupied_boxes_m", "occupancy"});
  const Vec3 origin = vec3_field(j, "origin_m");
  const double cell = number(j, "cell_size_m");
  if (!(cell > 0.0)) fail("cell_size_m must be positive");
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3) fail("grid.dims must have 3 entries");
  CellIndex dims{};
  for (int k = 0; k < 3; ++k) {
    if (!j["dims"][k].is_number_integer() || j["dims"][k].get<int>() <= 0) fail("grid.dims must be positive integers");
    dims[k] = j["dims"][k].get<int>();
  }
  GridMap3D grid(origin, cell, dims);
  if (j.contains("occupied_boxes_m")) {
    for (const auto& b : j["occupied_boxes_m"]) grid.fill_box(box(b, "occupied_boxes_m entry"));
  }
  if (j.contains("occupancy")) {
    // Nested [i][j][k] array of 0/1 or booleans.
    const json& occ = j["occupancy"];
    if (!occ.is_array() || static_cast<int>(occ.size()) != dims[0]) fail("occupancy must match grid.dims");
    for (int i = 0; i < dims[0]; ++i) {
      if (!occ[i].is_array() || static_cast<int>(occ[i].size()) != dims[1]) fail("occupancy must match grid.dims");
      for (int jj = 0; jj < dims[1]; ++jj) {
        const json& row = occ[i][jj];
        if (!row.is_array() || static_cast<int>(row.size()) != dims[2]) fail("occupancy must match grid.dims");
        for (int k = 0; k < dims[2]; ++k) {
          const bool v = row[k].is_boolean() ? row[k].get<bool>() : (row[k].is_number() && row[k].get<double>() != 0.0);
          if (v) grid.set_occupied({i, jj, k});
        }
      }
    }
  }
  return grid;
}

ArmObstacle parse_obstacle(const json& j) {
  check_keys(j, "arm_obstacles entry", {"id", "box_m", "vertices_m"});
  ArmObstacle o;
  if (!j.contains("id") || !j["id"].is_number_integer()) fail("arm obstacle needs an integer id");
  o.id = j["id"].get<int>();
  if (j.contains("box_m") == j.contains("vertices_m")) fail("arm obstacle needs exactly one of box_m, vertices_m");
  if (j.contains("box_m")) {
    o.hull = aabb_vertices(box(j["box_m"], "box_m"));
  } else {
    std::vector<Vec3> v;
    for (const auto& p : j["vertices_m"]) v.push_back(vec3_value(p, "vertices_m"));
    if (v.empty()) fail("vertices_m must be nonempty");
    o.hull = ConvexPolyhedronV(std::move(v));
  }
  return o;
}

GraspTask parse_task(const json& j) {
  GraspTask t;
  t.p_O = vec3_field(j, "p_O_m");
  read_opt(j, "psi_O_rad", t.psi_O);
  read_opt(j, "t_grip_s", t.t_grip);
  return t;
}

void parse_planner(const json& j, PlannerParams& p) {
  check_keys(j, "planner",
             {"inflate_radius_m", "r_S_m", "l_C_m", "l_s_m", "alpha", "degree", "max_iterations", "cone_angle_rad",
              "cone_time_fraction", "retract_cone_time_fraction", "delta_I_s", "approach_offset_m", "sweep_dt_s",
              "verify_sweep_dt_s", "verify_dt_s", "feasibility_slack_m", "sample_dt_s", "corridor_velocity_fraction",
              "corridor_accel_fraction", "corridor_min_cell_s"});
  read_opt(j, "inflate_radius_m", p.inflate_radius);
  read_opt(j, "r_S_m", p.r_S);
  read_opt(j, "l_C_m", p.l_C);
  read_opt(j, "l_s_m", p.l_s);
  read_opt(j, "alpha", p.alpha);
  read_opt(j, "degree", p.degree);
  read_opt(j, "max_iterations", p.max_iterations);
  read_opt(j, "cone_angle_rad", p.cone_angle);
  read_opt(j, "cone_time_fraction", p.cone_time_fraction);
  read_opt(j, "retract_cone_time_fraction", p.retract_cone_time_fraction);
  read_opt(j, "delta_I_s", p.delta_I);
  read_opt(j, "approach_offset_m", p.approach_offset);
  read_opt(j, "sweep_dt_s", p.sweep_dt);
  read_opt(j, "verify_sweep_dt_s", p.verify_sweep_dt);
  read_opt(j, "verify_dt_s", p.verify_dt);
  read_opt(j, "feasibility_slack_m", p.feasibility_slack);
  read_opt(j, "sample_dt_s", p.sample_dt);
  read_opt(j, "corridor_velocity_fraction", p.allocation.velocity_fraction);
  read_opt(j, "corridor_accel_fraction", p.allocation.accel_fraction);
  read_opt(j, "corridor_min_cell_s", p.allocation.min_duration);
}

void parse_workspace(const json& j, Scene& s) {
  check_keys(j, "workspace", {"w_min_m", "w_max_m", "derive"});
  if (j.contains("derive")) {
    if (j.contains("w_min_m") || j.contains("w_max_m")) fail("workspace: give either w_min_m/w_max_m or derive");
    const json& d = j["derive"];
    check_keys(d, "workspace.derive", {"delta", "joint_limits_rad", "tilt_bounds_rad", "samples"});
    WorkspaceDerivation w;
    if (d.contains("delta")) {
      const json& p = d["delta"];
      check_keys(p, "delta", {"l_U_m", "l_L_m", "r_F_m", "r_M_m", "l_g_m"});
      read_opt(p, "l_U_m", w.delta.l_U);
      read_opt(p, "l_L_m", w.delta.l_L);
      read_opt(p, "r_F_m", w.delta.r_F);
      read_opt(p, "r_M_m", w.delta.r_M);
      read_opt(p, "l_g_m", w.delta.l_g);
    }
    if (d.contains("joint_limits_rad")) {
      const json& l = d["joint_limits_rad"];
      if (!l.is_array() || l.size() != 2) fail("joint_limits_rad must be [lo, hi]");
      w.joints.q_lo = l[0].get<double>();
      w.joints.q_hi = l[1].get<double>();
    }
    if (d.contains("tilt_bounds_rad")) {
      const json& t = d["tilt_bounds_rad"];
      check_keys(t, "tilt_bounds_rad", {"theta_min", "theta_max", "phi_min", "phi_max"});
      read_opt(t, "theta_min", w.tilts.theta_min);
      read_opt(t, "theta_max", w.tilts.theta_max);
      read_opt(t, "phi_min", w.tilts.phi_min);
      read_opt(t, "phi_max", w.tilts.phi_max);
    }
    read_opt(d, "samples", w.samples);
    s.derive_workspace = w;
    return;
  }
  s.w_r.w_min = vec3_field(j, "w_min_m");
  s.w_r.w_max = vec3_field(j, "w_max_m");
}

}  // namespace

void Scene::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  };
  check(!tasks.empty(), "scene needs at least one task");
  const Aabb b = grid.bounds();
  check(b.contains(p_start), "p_start outside the grid");
  check(b.contains(p_end), "p_end outside the grid");
  for (const auto& t : tasks) {
    check(b.contains(t.p_O), "p_O outside the grid");
    check(std::isfinite(t.psi_O), "psi_O must be finite");
    check(t.t_grip >= 0.0, "t_grip must be nonnegative");
  }
  for (std::size_t i = 0; i < arm_obstacles.size(); ++i)
    for (std::size_t k = i + 1; k < arm_obstacles.size(); ++k)
      check(arm_obstacles[i].id != arm_obstacles[k].id, "arm obstacle ids must be unique");
  try {
    quad_limits.validate();
    ee_limits.validate();
    mount.validate();
    if (derive_workspace) {
      derive_workspace->delta.validate();
      derive_workspace->tilts.validate();
    } else {
      w_r.validate();
    }
  } catch (const PlanError& e) {
    fail(e.detail());
  }
  const PlannerParams& p = params;
  check(p.inflate_radius >= 0.0 && p.r_S > 0.0 && p.l_C > 0.0 && p.l_s >= 0.0, "shape parameters out of range");
  check(p.alpha > 0.0, "alpha must be positive");
  check(p.degree >= 5 && p.degree <= 15, "degree must be in [5, 15]");
  check(p.max_iterations >= 1, "max_iterations must be positive");
  check(p.cone_angle > 0.0 && p.cone_angle < M_PI / 2, "cone angle must be in (0, pi/2)");
  check(p.cone_time_fraction > 0.0 && p.cone_time_fraction < 1.0, "cone_time_fraction must be in (0, 1)");
  check(p.retract_cone_time_fraction > 0.0 && p.retract_cone_time_fraction < 1.0,
        "retract_cone_time_fraction must be in (0, 1)");
  check(p.delta_I > 0.0 && p.sweep_dt > 0.0 && p.verify_sweep_dt > 0.0 && p.verify_dt > 0.0 && p.sample_dt > 0.0,
        "time steps must be positive");
  check(p.approach_offset >= 0.0 && p.feasibility_slack >= 0.0, "offsets and slack must be nonnegative");
  check(p.allocation.velocity_fraction > 0.0 && p.allocation.accel_fraction > 0.0 && p.allocation.min_duration > 0.0,
        "corridor allocation must be positive");
}

Scene parse_scene(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("scene is not valid JSON: ") + e.what());
  }
  check_keys(j, "scene",
             {"name", "seed", "grid", "arm_obstacles", "p_start_m", "p_end_m", "tasks", "p_O_m", "psi_O_rad",
              "t_grip_s", "limits", "mount", "workspace", "planner"});
  Scene s;
  try {
    if (j.contains("name")) s.name = j["name"].get<std::string>();
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) fail("seed must be a nonnegative integer");
      s.seed = j["seed"].get<std::uint64_t>();
    }
    if (!j.contains("grid")) fail("missing 'grid'");
    s.grid = parse_grid(j["grid"]);
    if (j.contains("arm_obstacles"))
      for (const auto& o : j["arm_obstacles"]) s.arm_obstacles.push_back(parse_obstacle(o));
    s.p_start = vec3_field(j, "p_start_m");
    s.p_end = j.contains("p_end_m") ? vec3_field(j, "p_end_m") : s.p_start;
    if (j.contains("tasks") && j.contains("p_O_m")) fail("give either tasks or a top-level p_O_m");
    if (j.contains("tasks")) {
      for (const auto& t : j["tasks"]) {
        check_keys(t, "tasks entry", {"p_O_m", "psi_O_rad", "t_grip_s"});
        s.tasks.push_back(parse_task(t));
      }
    } else {
      s.tasks.push_back(parse_task(j));
    }
    if (j.contains("limits")) {
      const json& l = j["limits"];
      check_keys(l, "limits", {"quad_v_max_mps", "quad_a_max_mps2", "ee_v_max_mps", "ee_a_max_mps2"});
      read_opt(l, "quad_v_max_mps", s.quad_limits.v_max);
      read_opt(l, "quad_a_max_mps2", s.quad_limits.a_max);
      read_opt(l, "ee_v_max_mps", s.ee_limits.v_max);
      read_opt(l, "ee_a_max_mps2", s.ee_limits.a_max);
    }
    if (j.contains("mount")) {
      const json& m = j["mount"];
      check_keys(m, "mount", {"R_D_B", "p_C_B_m"});
      if (m.contains("R_D_B")) {
        const json& r = m["R_D_B"];
        if (!r.is_array() || r.size() != 3) fail("R_D_B must be 3x3");
        for (int i = 0; i < 3; ++i) s.mount.R_D_B.row(i) = vec3_value(r[i], "R_D_B row").transpose();
      }
      if (m.contains("p_C_B_m")) s.mount.p_C_B = vec3_field(m, "p_C_B_m");
    }
    if (j.contains("workspace")) parse_workspace(j["workspace"], s);
    if (j.contains("planner")) parse_planner(j["planner"], s.params);
  } catch (const json::exception& e) {
    fail(std::string("scene field has the wrong type: ") + e.what());
  }
  s.validate();
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scene file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Scene s = parse_scene(ss.str());
  if (s.name.empty()) s.name = path;
  return s;
}

}  // namespace pickplan
