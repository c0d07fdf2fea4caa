#include "pickplan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pickplan/collision.hpp"
#include "pickplan/feasibility.hpp"
#include "pickplan/gjk.hpp"
#include "pickplan/pipeline.hpp"

namespace pickplan {

namespace {

constexpr double kExact = 1e-6;

// Sample times k*dt from a to b with b always included.
std::vector<double> samples(double a, double b, double dt) {
  std::vector<double> out;
  if (b < a) return out;
  const int n = static_cast<int>(std::ceil((b - a) / dt - 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(std::min(b, a + k * dt));
  return out;
}

void add(VerificationReport& r, std::string name, double worst, double limit, std::string detail = {}) {
  r.checks.push_back({std::move(name), worst <= limit, worst, limit, std::move(detail)});
}

double cone_excess(const Vec3& p, const Vec3& apex, double angle) {
  const double reach = (apex.z() - p.z()) * std::tan(angle);
  return std::max(std::abs(p.x() - apex.x()), std::abs(p.y() - apex.y())) - reach;
}

}  // namespace

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_plan(const PlanResult& result, const Scene& scene) {
  VerificationReport rep;
  const PlannerParams& prm = scene.params;
  const PiecewiseBezier& quad = result.quad;
  if (quad.empty()) {
    add(rep, "quad_trajectory_present", 1.0, 0.0, "no quadcopter trajectory");
    return rep;
  }
  const std::vector<double> ts = samples(quad.t_begin(), quad.t_end(), prm.verify_dt);

  add(rep, "quad_endpoints",
      std::max((quad.position(quad.t_begin()) - scene.p_start).norm(), (quad.position(quad.t_end()) - scene.p_end).norm()),
      kExact);
  add(rep, "quad_continuity", quad.continuity_error(), kExact);

  double v_worst = 0.0, a_worst = 0.0;
  for (double t : ts) {
    const CurveState st = quad.eval(t);
    v_worst = std::max(v_worst, st.velocity.cwiseAbs().maxCoeff());
    a_worst = std::max(a_worst, st.acceleration.cwiseAbs().maxCoeff());
  }
  add(rep, "quad_velocity", v_worst, scene.quad_limits.v_max + kExact);
  add(rep, "quad_acceleration", a_worst, scene.quad_limits.a_max + kExact);

  // Each sample must lie in a cell whose time slot contains it; at a cell
  // boundary either neighbor qualifies.
  double corridor_worst = -std::numeric_limits<double>::infinity();
  for (const LegPlan& leg : result.legs) {
    for (double t : samples(leg.t0, leg.t1, prm.verify_dt)) {
      const Vec3 p = quad.position(t);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < leg.corridor.size(); ++k) {
        if (t < leg.cell_start[k] - 1e-9 || t > leg.cell_start[k + 1] + 1e-9) continue;
        best = std::min(best, leg.corridor.cells[k].max_violation(p));
      }
      corridor_worst = std::max(corridor_worst, best);
    }
  }
  add(rep, "corridor_containment", std::max(0.0, corridor_worst), kExact);

  double base_hold = 0.0;
  for (const TaskPlan& tp : result.tasks)
    for (double t : samples(tp.t_G, tp.t_release, prm.verify_dt))
      base_hold = std::max(base_hold, (quad.position(t) - tp.p_B_f).norm());
  add(rep, "base_hold", base_hold, kExact);

  const bool manipulation = !result.tasks.empty() &&
                            std::all_of(result.tasks.begin(), result.tasks.end(), [](const TaskPlan& tp) { return tp.planned; });
  if (!manipulation) return rep;

  double endpoint = 0.0, ev = 0.0, ea = 0.0, hold = 0.0, geo = -std::numeric_limits<double>::infinity(), cone = -1.0;
  double collision_total = 0.0;
  for (std::size_t k = 0; k < result.tasks.size(); ++k) {
    const TaskPlan& tp = result.tasks[k];
    const Vec3& p_O = tp.task.p_O;
    const double psi = tp.task.psi_O;

    const CurveState a0 = tp.approach.eval(tp.t_B), a1 = tp.approach.eval(tp.t_G);
    const CurveState r0 = tp.retract.eval(tp.t_release), r1 = tp.retract.eval(tp.t_back);
    endpoint = std::max({endpoint, (a0.position - retracted_ee_position(quad, tp.t_B, result.p_top_B, psi)).norm(),
                         (r1.position - retracted_ee_position(quad, tp.t_back, result.p_top_B, psi)).norm(),
                         (a1.position - p_O).norm(), a1.velocity.norm(), a1.acceleration.norm(),
                         (r0.position - p_O).norm(), r0.velocity.norm(), r0.acceleration.norm()});

    for (const BezierSegment* seg : {&tp.approach, &tp.retract})
      for (double t : samples(seg->t0(), seg->t1(), prm.verify_dt)) {
        const CurveState st = seg->eval(t);
        ev = std::max(ev, st.velocity.cwiseAbs().maxCoeff());
        ea = std::max(ea, st.acceleration.cwiseAbs().maxCoeff());
      }

    for (double t : samples(tp.t_G, tp.t_release, prm.verify_dt))
      hold = std::max(hold, (ee_state_at(result, t).state.position - p_O).norm());

    for (double t : samples(tp.t_B, tp.t_back, prm.verify_dt))
      geo = std::max(geo, geometric_feasibility_excess(ee_state_at(result, t).state.position, quad.position(t), psi,
                                                       result.w_r));

    const double t_c_in = tp.t_B + prm.cone_time_fraction * (tp.t_G - tp.t_B);
    const double t_c_out = tp.t_release + prm.retract_cone_time_fraction * (tp.t_back - tp.t_release);
    cone = std::max({cone, cone_excess(tp.approach.position(t_c_in), p_O, prm.cone_angle),
                     cone_excess(tp.retract.position(t_c_out), p_O, prm.cone_angle)});

    // Every arm obstacle, no local-box filtering.
    const std::vector<double> sweep = samples(tp.t_B, tp.t_back, prm.verify_sweep_dt);
    std::vector<Vec3> ee(sweep.size());
    std::vector<Vec3> base(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      ee[i] = ee_state_at(result, sweep[i]).state.position;
      base[i] = quad.position(sweep[i]);
    }
    for (const ArmObstacle& obs : scene.arm_obstacles) {
      // One record per run of consecutive colliding samples; length is the
      // end-effector path length over the run.
      int first = -1;
      double len = 0.0;
      for (std::size_t i = 0; i <= sweep.size(); ++i) {
        const bool hit = i < sweep.size() &&
                         gjk_query(shape_polyhedron(base[i], ee[i], psi, scene.mount, prm.r_S, prm.l_C).hull(), obs.hull)
                             .intersects;
        if (hit) {
          if (first < 0) {
            first = static_cast<int>(i);
            len = 0.0;
          } else {
            len += (ee[i] - ee[i - 1]).norm();
          }
        } else if (first >= 0) {
          rep.collisions.push_back({static_cast<int>(k), obs.id, sweep[first], sweep[i - 1], len});
          // A single colliding sample still fails the check.
          collision_total += std::max(len, prm.verify_sweep_dt * 1e-3);
          first = -1;
        }
      }
    }
  }
  add(rep, "ee_endpoints", endpoint, kExact);
  add(rep, "ee_velocity", ev, scene.ee_limits.v_max + kExact);
  add(rep, "ee_acceleration", ea, scene.ee_limits.a_max + kExact);
  add(rep, "grasp_hold", hold, kExact);
  add(rep, "geometric_feasibility", std::max(0.0, geo), prm.feasibility_slack);
  add(rep, "grasp_cone", std::max(0.0, cone), kExact);
  std::ostringstream what;
  what << rep.collisions.size() << " colliding obstacle windows";
  add(rep, "collision_sweep", collision_total, 0.0, what.str());
  return rep;
}

}  // namespace pickplan
