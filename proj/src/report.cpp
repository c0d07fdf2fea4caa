#include "pickplan/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pickplan/error.hpp"

namespace pickplan {

namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json segment_json(const BezierSegment& s) {
  json cps = json::array();
  for (const auto& c : s.control_points()) cps.push_back(vec_json(c));
  return {{"t0_s", s.t0()}, {"t1_s", s.t1()}, {"control_points_m", cps}};
}

BezierSegment segment_from(const json& j) {
  std::vector<Vec3> cps;
  for (const auto& c : j.at("control_points_m")) cps.push_back(vec_from(c));
  return BezierSegment(std::move(cps), j.at("t0_s").get<double>(), j.at("t1_s").get<double>());
}

json trace_json(const std::vector<EeIteration>& trace) {
  json out = json::array();
  for (const auto& it : trace) {
    json mirrors = json::array(), intervals = json::array();
    for (const auto& m : it.mirrors)
      mirrors.push_back({{"obstacle_id", m.obstacle_id}, {"lambda", m.lambda}, {"p_M_m", vec_json(m.p_M)}});
    for (const auto& iv : it.intervals)
      intervals.push_back({{"obstacle_id", iv.obstacle_id}, {"t_L_s", iv.t_L}, {"t_R_s", iv.t_R}, {"length_m", iv.length()}});
    out.push_back({{"iteration", it.iteration},
                   {"qp_iterations", it.qp_iterations},
                   {"objective", it.objective},
                   {"mirrors", mirrors},
                   {"intervals", intervals}});
  }
  return out;
}

std::string_view stage_name(PlanStage s) {
  switch (s) {
    case PlanStage::Moving: return "moving";
    case PlanStage::Manipulation: return "manipulation";
    case PlanStage::All: return "all";
  }
  return "all";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PlanError(ErrorCode::IoError, "cannot write " + path.string(), Stage::Export);
  out << text;
  if (!out) throw PlanError(ErrorCode::IoError, "write failed for " + path.string(), Stage::Export);
}

}  // namespace

std::string trajectory_csv(const PlanResult& result, const ExportOptions& options) {
  if (!(options.sample_dt > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "sample_dt must be positive", Stage::Export);
  std::string out = "t_s,body,px,py,pz,vx,vy,vz,ax,ay,az,stage\n";
  if (result.quad.empty()) return out;
  const double t0 = result.quad.t_begin(), t1 = result.quad.t_end();
  const long n = static_cast<long>(std::ceil((t1 - t0) / options.sample_dt - 1e-9));
  char buf[512];
  // Values that round to zero print as 0 rather than -0.
  auto c = [](double v) { return std::abs(v) < 5e-10 ? 0.0 : v; };
  auto row = [&](double t, const char* body, const CurveState& s, std::string_view stage) {
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.*s\n", t, body,
                  c(s.position.x()), c(s.position.y()), c(s.position.z()), c(s.velocity.x()), c(s.velocity.y()),
                  c(s.velocity.z()), c(s.acceleration.x()), c(s.acceleration.y()), c(s.acceleration.z()),
                  static_cast<int>(stage.size()), stage.data());
    out += buf;
  };
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(t1, t0 + static_cast<double>(k) * options.sample_dt);
    const EeSample ee = ee_state_at(result, t);
    if (options.plan.stage == PlanStage::Manipulation && ee.phase == TrajectoryPhase::Retracted) continue;
    const std::string_view stage = ee.phase == TrajectoryPhase::Retracted ? "moving" : to_string(ee.phase);
    row(t, "base", result.quad.eval(t), stage);
    row(t, "ee", ee.state, stage);
  }
  return out;
}

std::string report_json(const PlanResult& result, const Scene& scene, const ExportOptions& options) {
  json tasks = json::array();
  for (std::size_t k = 0; k < result.tasks.size(); ++k) {
    const TaskPlan& tp = result.tasks[k];
    json t = {{"index", k},
              {"p_O_m", vec_json(tp.task.p_O)},
              {"psi_O_rad", tp.task.psi_O},
              {"p_B_f_m", vec_json(tp.p_B_f)},
              {"t_B_s", tp.t_B},
              {"t_G_s", tp.t_G},
              {"t_grip_s", tp.task.t_grip},
              {"t_release_s", tp.t_release},
              {"t_back_s", tp.t_back},
              {"planned", tp.planned}};
    if (tp.planned) {
      t["approach"] = {{"iterations", tp.approach_trace.size()}, {"trace", trace_json(tp.approach_trace)}};
      t["retract"] = {{"iterations", tp.retract_trace.size()}, {"trace", trace_json(tp.retract_trace)}};
    }
    tasks.push_back(t);
  }
  json legs = json::array();
  for (std::size_t k = 0; k < result.legs.size(); ++k) {
    const LegPlan& l = result.legs[k];
    legs.push_back({{"index", k},
                    {"t0_s", l.t0},
                    {"t1_s", l.t1},
                    {"path_cells", l.path.cells.size()},
                    {"path_cost_m", l.path.cost},
                    {"corridor_cells", l.corridor.size()},
                    {"retries", l.info.retries},
                    {"qp_iterations", l.info.qp_iterations},
                    {"axis_separable", l.info.axis_separable}});
  }
  json checks = json::array(), collisions = json::array();
  for (const auto& c : result.verification.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"limit", c.limit}, {"detail", c.detail}});
  for (const auto& c : result.verification.collisions)
    collisions.push_back({{"task", c.task}, {"obstacle_id", c.obstacle_id}, {"t_L_s", c.t_L}, {"t_R_s", c.t_R}, {"length_m", c.length}});

  json j = {{"schema_version", 1},
            {"scene", scene.name},
            {"seed", scene.seed},
            {"status", result.verification.pass() ? "PASS" : "FAIL"},
            {"options", {{"ee_avoidance", options.plan.ee_avoidance}, {"stage", stage_name(options.plan.stage)}, {"sample_dt_s", options.sample_dt}}},
            {"workspace", {{"w_min_m", vec_json(result.w_r.w_min)}, {"w_max_m", vec_json(result.w_r.w_max)}, {"p_top_B_m", vec_json(result.p_top_B)}}},
            {"timeline", {{"t_start_s", result.quad.empty() ? 0.0 : result.quad.t_begin()}, {"t_end_s", result.quad.empty() ? 0.0 : result.quad.t_end()}}},
            {"legs", legs},
            {"tasks", tasks},
            {"verification", {{"pass", result.verification.pass()}, {"checks", checks}, {"collisions", collisions}}}};
  return j.dump(2) + "\n";
}

std::string plan_json(const PlanResult& result) {
  json quad = json::array();
  for (const auto& s : result.quad.segments()) quad.push_back(segment_json(s));
  json legs = json::array();
  for (const auto& l : result.legs) {
    json cells = json::array();
    for (const auto& c : l.corridor.cells) {
      json a = json::array();
      for (int r = 0; r < c.rows(); ++r) a.push_back({c.A()(r, 0), c.A()(r, 1), c.A()(r, 2)});
      cells.push_back({{"A", a}, {"b", std::vector<double>(c.b().data(), c.b().data() + c.b().size())}});
    }
    legs.push_back({{"t0_s", l.t0}, {"t1_s", l.t1}, {"cell_start_s", l.cell_start}, {"cells", cells}});
  }
  json tasks = json::array();
  for (const auto& tp : result.tasks) {
    json t = {{"p_O_m", vec_json(tp.task.p_O)}, {"psi_O_rad", tp.task.psi_O}, {"t_grip_s", tp.task.t_grip},
              {"p_B_f_m", vec_json(tp.p_B_f)}, {"t_B_s", tp.t_B},   {"t_G_s", tp.t_G},
              {"t_release_s", tp.t_release},   {"t_back_s", tp.t_back}, {"planned", tp.planned}};
    if (tp.planned) {
      t["approach"] = segment_json(tp.approach);
      t["retract"] = segment_json(tp.retract);
    }
    tasks.push_back(t);
  }
  json j = {{"w_min_m", vec_json(result.w_r.w_min)},
            {"w_max_m", vec_json(result.w_r.w_max)},
            {"p_top_B_m", vec_json(result.p_top_B)},
            {"quad", quad},
            {"legs", legs},
            {"tasks", tasks}};
  return j.dump(1) + "\n";
}

PlanResult parse_plan_json(const std::string& text) {
  PlanResult r;
  try {
    const json j = json::parse(text);
    r.w_r.w_min = vec_from(j.at("w_min_m"));
    r.w_r.w_max = vec_from(j.at("w_max_m"));
    r.p_top_B = vec_from(j.at("p_top_B_m"));
    for (const auto& s : j.at("quad")) r.quad.append(segment_from(s));
    for (const auto& l : j.at("legs")) {
      LegPlan leg;
      leg.t0 = l.at("t0_s").get<double>();
      leg.t1 = l.at("t1_s").get<double>();
      leg.cell_start = l.at("cell_start_s").get<std::vector<double>>();
      for (const auto& c : l.at("cells")) {
        const auto b = c.at("b").get<std::vector<double>>();
        Eigen::MatrixX3d a(b.size(), 3);
        for (std::size_t i = 0; i < b.size(); ++i) a.row(i) = vec_from(c.at("A").at(i)).transpose();
        leg.corridor.cells.emplace_back(a, Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
      }
      if (leg.cell_start.size() != leg.corridor.cells.size() + 1)
        throw PlanError(ErrorCode::IoError, "plan leg has inconsistent cell timing", Stage::Verification);
      r.legs.push_back(std::move(leg));
    }
    for (const auto& t : j.at("tasks")) {
      TaskPlan tp;
      tp.task.p_O = vec_from(t.at("p_O_m"));
      tp.task.psi_O = t.at("psi_O_rad").get<double>();
      tp.task.t_grip = t.at("t_grip_s").get<double>();
      tp.p_B_f = vec_from(t.at("p_B_f_m"));
      tp.t_B = t.at("t_B_s").get<double>();
      tp.t_G = t.at("t_G_s").get<double>();
      tp.t_release = t.at("t_release_s").get<double>();
      tp.t_back = t.at("t_back_s").get<double>();
      tp.planned = t.at("planned").get<bool>();
      if (tp.planned) {
        tp.approach = segment_from(t.at("approach"));
        tp.retract = segment_from(t.at("retract"));
      }
      r.tasks.push_back(std::move(tp));
    }
  } catch (const json::exception& e) {
    throw PlanError(ErrorCode::IoError, std::string("malformed plan file: ") + e.what(), Stage::Verification);
  }
  return r;
}

std::string timing_json(const PlanResult& result) {
  const json j = {{"quad_ms", result.timings.quad_ms},
                  {"ee_ms", result.timings.ee_ms},
                  {"verify_ms", result.timings.verify_ms}};
  return j.dump(2) + "\n";
}

void export_plan(const PlanResult& result, const Scene& scene, const std::string& dir, const ExportOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw PlanError(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message(), Stage::Export);
  const fs::path base(dir);
  write_file(base / "trajectory.csv", trajectory_csv(result, options));
  write_file(base / "report.json", report_json(result, scene, options));
  write_file(base / "plan.json", plan_json(result));
  write_file(base / "timing.json", timing_json(result));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pickplan
