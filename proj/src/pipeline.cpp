#include "pickplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include <spdlog/spdlog.h>

#include "pickplan/error.hpp"

namespace pickplan {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Attributes stage-less library errors to the pipeline stage that raised them.
template <class F>
auto staged(Stage stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PlanError& e) {
    if (e.stage() == Stage::None) throw e.with_stage(stage);
    throw;
  }
}

// Mirror of the arm's initial state at the end of retraction: forward velocity
// difference, central acceleration difference.
EeState terminal_state(const PiecewiseBezier& quad, double t, const Vec3& p_top_B, double psi, double delta) {
  const Vec3 lo = retracted_ee_position(quad, t - delta, p_top_B, psi);
  const Vec3 mid = retracted_ee_position(quad, t, p_top_B, psi);
  const Vec3 hi = retracted_ee_position(quad, t + delta, p_top_B, psi);
  EeState s;
  s.p = mid;
  s.v = (hi - mid) / delta;
  s.a = (hi - 2.0 * mid + lo) / (delta * delta);
  return s;
}

struct LegSpec {
  Vec3 from, to;
  int depart_task = -1;  // designed cell prepended
  int arrive_task = -1;  // designed cell appended
};

}  // namespace

RevisedWorkspace scene_workspace(const Scene& scene) {
  if (!scene.derive_workspace) return scene.w_r;
  return staged(Stage::Workspace, [&] {
    const WorkspaceDerivation& d = *scene.derive_workspace;
    const HalfspacePolytope w = approximate_workspace(d.delta, d.joints, d.samples, scene.seed);
    return inscribed_cuboid(workspace_intersection(w, scene.mount, d.tilts));
  });
}

std::string_view to_string(TrajectoryPhase phase) {
  switch (phase) {
    case TrajectoryPhase::Retracted: return "retracted";
    case TrajectoryPhase::Approach: return "approach";
    case TrajectoryPhase::Hold: return "hold";
    case TrajectoryPhase::Retract: return "retract";
  }
  return "unknown";
}

PlanResult plan_mission(const Scene& scene, const PlanOptions& options) {
  staged(Stage::Scene, [&] { scene.validate(); });
  const PlannerParams& prm = scene.params;
  PlanResult result;

  const auto quad_clock = Clock::now();
  result.w_r = scene_workspace(scene);
  result.p_top_B = workspace_top_point(result.w_r);
  result.p_top_B.z() = std::max(result.p_top_B.z(), result.w_r.center().z() - prm.approach_offset);
  const double window = scene.ee_limits.window();
  const int n_tasks = static_cast<int>(scene.tasks.size());

  std::vector<Vec3> grasp_base(n_tasks);
  std::vector<HalfspacePolytope> designed(n_tasks);
  const GridMap3D free_space = staged(Stage::PathSearch, [&] { return scene.grid.inflated(prm.inflate_radius); });
  for (int k = 0; k < n_tasks; ++k) {
    const GraspTask& task = scene.tasks[k];
    grasp_base[k] = staged(Stage::GraspPosition, [&] { return feasible_grasp_position(task.p_O, task.psi_O, result.w_r); });
    designed[k] = designed_polyhedron(grasp_base[k], task.psi_O, result.w_r);
    staged(Stage::Corridor, [&] { require_free(free_space, designed[k], polytope_bounds(designed[k])); });
  }

  std::vector<LegSpec> specs;
  for (int k = 0; k <= n_tasks; ++k) {
    LegSpec s;
    s.from = k == 0 ? scene.p_start : grasp_base[k - 1];
    s.to = k == n_tasks ? scene.p_end : grasp_base[k];
    s.depart_task = k == 0 ? -1 : k - 1;
    s.arrive_task = k == n_tasks ? -1 : k;
    specs.push_back(s);
  }

  const RevisedWorkspace& w_r = result.w_r;
  const DerivativeBounds moving{scene.quad_limits.v_max, scene.quad_limits.a_max};
  const DerivativeBounds manip = manipulation_bounds(result.p_top_B, std::min(w_r.half_extent().x(), w_r.half_extent().y()),
                                                     scene.ee_limits.v_max, scene.ee_limits.a_max, scene.quad_limits);
  QuadOptions qopt;
  qopt.degree = prm.degree;

  double t = 0.0;
  result.tasks.resize(n_tasks);
  for (std::size_t li = 0; li < specs.size(); ++li) {
    const LegSpec& s = specs[li];
    LegPlan leg;
    leg.path = staged(Stage::PathSearch, [&] {
      const auto a = free_space.cell_at(s.from), b = free_space.cell_at(s.to);
      if (!a) throw PlanError(ErrorCode::StartOccupied, "leg start outside the grid");
      if (!b) throw PlanError(ErrorCode::GoalOccupied, "leg goal outside the grid");
      return astar_cells(free_space, *a, *b);
    });
    QuadLeg q;
    q.corridor = staged(Stage::Corridor, [&] {
      Corridor c = generate_corridor(free_space, leg.path, s.from, s.to, scene.quad_limits, prm.allocation);
      if (s.depart_task >= 0) prepend_cell(c, designed[s.depart_task], window);
      if (s.arrive_task >= 0) append_cell(c, designed[s.arrive_task], window);
      c.validate();
      return c;
    });
    q.bounds.assign(q.corridor.size(), moving);
    q.fixed_duration.assign(q.corridor.size(), false);
    if (s.depart_task >= 0) {
      q.bounds.front() = manip;
      q.fixed_duration.front() = true;
    }
    if (s.arrive_task >= 0) {
      q.bounds.back() = manip;
      q.fixed_duration.back() = true;
    }
    q.p_start = s.from;
    q.p_goal = s.to;
    q.t0 = t;
    const PiecewiseBezier curve = staged(Stage::QuadTrajectory, [&] { return generate_quad_trajectory(q, qopt, &leg.info); });
    leg.corridor = q.corridor;
    leg.corridor.durations = leg.info.durations;
    leg.t0 = t;
    leg.cell_start.push_back(t);
    for (double d : leg.info.durations) leg.cell_start.push_back(leg.cell_start.back() + d);
    leg.t1 = curve.t_end();
    result.quad.append(curve);
    t = leg.t1;
    spdlog::debug("leg {}: {} cells, {} retries, {:.3f} s", li, leg.corridor.size(), leg.info.retries, leg.t1 - leg.t0);

    if (s.depart_task >= 0) result.tasks[s.depart_task].t_back = leg.cell_start[1];
    if (s.arrive_task >= 0) {
      TaskPlan& tp = result.tasks[s.arrive_task];
      tp.task = scene.tasks[s.arrive_task];
      tp.p_B_f = grasp_base[s.arrive_task];
      tp.t_G = t;
      tp.t_B = staged(Stage::EeInitialState, [&] { return manipulation_start_time(tp.t_G, scene.ee_limits); });
      tp.t_release = t + tp.task.t_grip;
      if (tp.task.t_grip > 0.0) result.quad.append(hold_segment(tp.p_B_f, t, tp.task.t_grip, prm.degree));
      t = tp.t_release;
    }
    result.legs.push_back(std::move(leg));
  }
  result.timings.quad_ms = ms_since(quad_clock);

  if (options.stage != PlanStage::Moving) {
    const auto ee_clock = Clock::now();
    for (int k = 0; k < n_tasks; ++k) {
      TaskPlan& tp = result.tasks[k];
      EePlanConfig cfg;
      cfg.psi_O = tp.task.psi_O;
      cfg.w_r = w_r;
      cfg.limits = scene.ee_limits;
      cfg.cone.apex = tp.task.p_O;
      cfg.cone.angle = prm.cone_angle;
      cfg.degree = prm.degree;
      cfg.alpha = prm.alpha;
      cfg.max_iterations = prm.max_iterations;
      cfg.avoidance = options.ee_avoidance;
      cfg.sweep.psi = tp.task.psi_O;
      cfg.sweep.mount = scene.mount;
      cfg.sweep.r_S = prm.r_S;
      cfg.sweep.l_C = prm.l_C;
      cfg.sweep.dt = prm.sweep_dt;
      cfg.fine_dt = prm.verify_sweep_dt;
      cfg.obstacles = scene.arm_obstacles;
      const EeState at_object{tp.task.p_O, Vec3::Zero(), Vec3::Zero()};

      const EeState start = staged(Stage::EeInitialState, [&] {
        return initial_state(result.quad, tp.t_B, result.p_top_B, tp.task.psi_O, prm.delta_I);
      });
      cfg.cone.tau = prm.cone_time_fraction;
      cfg.sweep.box = local_map_box(result.quad.position(tp.t_B), tp.task.p_O, prm.l_s);
      EePlan approach = staged(Stage::EeTrajectory, [&] {
        return plan_ee_trajectory(result.quad, tp.t_B, tp.t_G, start, at_object, cfg);
      });
      tp.approach = approach.segment;
      tp.approach_trace = std::move(approach.trace);

      const EeState back = staged(Stage::EeInitialState, [&] {
        return terminal_state(result.quad, tp.t_back, result.p_top_B, tp.task.psi_O, prm.delta_I);
      });
      cfg.cone.tau = prm.retract_cone_time_fraction;
      cfg.sweep.box = local_map_box(result.quad.position(tp.t_back), tp.task.p_O, prm.l_s);
      EePlan retract = staged(Stage::EeTrajectory, [&] {
        return plan_ee_trajectory(result.quad, tp.t_release, tp.t_back, at_object, back, cfg);
      });
      tp.retract = retract.segment;
      tp.retract_trace = std::move(retract.trace);
      tp.planned = true;
      spdlog::debug("task {}: approach {} iterations, retraction {} iterations", k, tp.approach_trace.size(),
                    tp.retract_trace.size());
    }
    result.timings.ee_ms = ms_since(ee_clock);
  }

  const auto verify_clock = Clock::now();
  result.verification = verify_plan(result, scene);
  result.timings.verify_ms = ms_since(verify_clock);
  return result;
}

EeSample ee_state_at(const PlanResult& result, double t, double fd_step) {
  EeSample out;
  double psi = result.tasks.empty() ? 0.0 : result.tasks.back().task.psi_O;
  for (const TaskPlan& tp : result.tasks) {
    if (tp.planned && t >= tp.t_B && t <= tp.t_back) {
      if (t <= tp.t_G) {
        out.state = tp.approach.eval(t);
        out.phase = TrajectoryPhase::Approach;
      } else if (t <= tp.t_release) {
        out.state.position = tp.task.p_O;
        out.phase = TrajectoryPhase::Hold;
      } else {
        out.state = tp.retract.eval(t);
        out.phase = TrajectoryPhase::Retract;
      }
      return out;
    }
    // Heading follows the task whose manipulation window comes next.
    if (t <= tp.t_back) {
      psi = tp.task.psi_O;
      break;
    }
  }
  const double lo = std::max(result.quad.t_begin(), t - fd_step);
  const double hi = std::min(result.quad.t_end(), t + fd_step);
  const Vec3 p_lo = retracted_ee_position(result.quad, lo, result.p_top_B, psi);
  const Vec3 p_mid = retracted_ee_position(result.quad, t, result.p_top_B, psi);
  const Vec3 p_hi = retracted_ee_position(result.quad, hi, result.p_top_B, psi);
  out.state.position = p_mid;
  out.state.velocity = (p_hi - p_lo) / (hi - lo);
  if (hi - t > 0.0 && t - lo > 0.0)
    out.state.acceleration = 2.0 * ((p_hi - p_mid) / (hi - t) - (p_mid - p_lo) / (t - lo)) / (hi - lo);
  out.phase = TrajectoryPhase::Retracted;
  return out;
}

}  // namespace pickplan
