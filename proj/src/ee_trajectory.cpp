#include "pickplan/ee_trajectory.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "pickplan/error.hpp"

namespace pickplan {

void EeLimits::validate() const {
  if (!(v_max > 0.0) || !(a_max > 0.0)) throw PlanError(ErrorCode::SceneError, "end-effector limits must be positive");
}

double manipulation_start_time(double t_G, const EeLimits& limits) {
  limits.validate();
  const double w = limits.window();
  if (!(t_G > w)) {
    throw PlanError(ErrorCode::NegativeWindow, "grasp time leaves no room for the manipulation window",
                    Stage::EeInitialState);
  }
  return t_G - w;
}

RotMat3 flat_attitude(const Vec3& accel, double psi_O, double g) {
  const Vec3 thrust = accel + g * Vec3::UnitZ();
  if (thrust.norm() <= 1e-6) throw PlanError(ErrorCode::Singular, "free fall leaves attitude undefined", Stage::EeInitialState);
  const Vec3 r3 = thrust.normalized();
  const Vec3 r_g(std::cos(psi_O), std::sin(psi_O), 0.0);
  const Vec3 c = r3.cross(r_g);
  if (c.norm() <= 1e-9) throw PlanError(ErrorCode::Singular, "thrust axis parallel to heading", Stage::EeInitialState);
  const Vec3 r2 = c.normalized();
  const Vec3 r1 = r2.cross(r3);
  RotMat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r3;
  return r;
}

Vec3 retracted_ee_position(const PiecewiseBezier& quad, double t, const Vec3& p_top_B, double psi_O) {
  const CurveState st = quad.eval(t);
  return st.position + flat_attitude(st.acceleration, psi_O) * p_top_B;
}

EeState initial_state(const PiecewiseBezier& quad, double t_B, const Vec3& p_top_B, double psi_O, double delta_I) {
  if (!(delta_I > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "delta_I must be positive", Stage::EeInitialState);
  const Vec3 lo = retracted_ee_position(quad, t_B - delta_I, p_top_B, psi_O);
  const Vec3 mid = retracted_ee_position(quad, t_B, p_top_B, psi_O);
  const Vec3 hi = retracted_ee_position(quad, t_B + delta_I, p_top_B, psi_O);
  EeState s;
  s.p = mid;
  s.v = (mid - lo) / delta_I;
  s.a = (hi - 2.0 * mid + lo) / (delta_I * delta_I);
  return s;
}

int ee_inequality_rows(int degree) { return 18 * degree + 4; }

QpProblem build_ee_qp(const EeState& start, const EeState& end, const std::vector<Vec3>& quad_fit_cps,
                      const RevisedWorkspace& w_r, double psi_O, const EeLimits& limits, const ConeSpec& cone,
                      const ObstacleMirrorSet& mirrors, double duration, EeQpCounts* counts) {
  const int n = static_cast<int>(quad_fit_cps.size()) - 1;
  if (n < 3) throw PlanError(ErrorCode::DimensionMismatch, "end-effector curve needs degree >= 3", Stage::EeTrajectory);
  if (!(duration > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "duration must be positive", Stage::EeTrajectory);
  const int m = n + 1;
  const int nv = 3 * m;
  auto idx = [m](int axis, int i) { return axis * m + i; };
  EeQpCounts cnt;

  QpProblem p = QpProblem::with_size(nv);
  Eigen::MatrixXd h = jerk_hessian(n, duration);
  h /= h.diagonal().mean();
  double lambda_sum = 0.0;
  Vec3 pull = Vec3::Zero();
  for (const auto& mr : mirrors) {
    lambda_sum += mr.lambda;
    pull += mr.lambda * mr.p_M;
  }
  for (int a = 0; a < 3; ++a) {
    p.Q.block(idx(a, 0), idx(a, 0), m, m) = 2.0 * h + 2.0 * lambda_sum * Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i) p.q[idx(a, i)] = -2.0 * pull[a];
  }

  const Eigen::MatrixXd d1 = derivative_operator(n, 1) / duration;
  const Eigen::MatrixXd d2 = derivative_operator(n, 2) / (duration * duration);

  p.A_eq = Eigen::MatrixXd::Zero(18, nv);
  p.b_eq = Eigen::VectorXd::Zero(18);
  int r = 0;
  for (int a = 0; a < 3; ++a) {
    p.A_eq(r, idx(a, 0)) = 1.0;
    p.b_eq[r++] = start.p[a];
    p.A_eq.block(r, idx(a, 0), 1, m) = d1.row(0);
    p.b_eq[r++] = start.v[a];
    p.A_eq.block(r, idx(a, 0), 1, m) = d2.row(0);
    p.b_eq[r++] = start.a[a];
    p.A_eq(r, idx(a, n)) = 1.0;
    p.b_eq[r++] = end.p[a];
    p.A_eq.block(r, idx(a, 0), 1, m) = d1.row(n - 1);
    p.b_eq[r++] = end.v[a];
    p.A_eq.block(r, idx(a, 0), 1, m) = d2.row(n - 2);
    p.b_eq[r++] = end.a[a];
  }
  cnt.equalities = r;

  const int n_ie = ee_inequality_rows(n);
  p.A_ie = Eigen::MatrixXd::Zero(n_ie, nv);
  p.b_ie = Eigen::VectorXd::Zero(n_ie);
  r = 0;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < n; ++i) {
      p.A_ie.block(r, idx(a, 0), 1, m) = d1.row(i);
      p.b_ie[r++] = limits.v_max;
      p.A_ie.block(r, idx(a, 0), 1, m) = -d1.row(i);
      p.b_ie[r++] = limits.v_max;
      cnt.velocity += 2;
    }
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i + 1 < n; ++i) {
      p.A_ie.block(r, idx(a, 0), 1, m) = d2.row(i);
      p.b_ie[r++] = limits.a_max;
      p.A_ie.block(r, idx(a, 0), 1, m) = -d2.row(i);
      p.b_ie[r++] = limits.a_max;
      cnt.acceleration += 2;
    }
  const RotMat3 rt = yaw_rotation(psi_O).transpose();
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < 3; ++k) {
      const double shift = rt.row(k).dot(quad_fit_cps[i]);
      for (int a = 0; a < 3; ++a) {
        p.A_ie(r, idx(a, i)) = rt(k, a);
        p.A_ie(r + 1, idx(a, i)) = -rt(k, a);
      }
      p.b_ie[r] = w_r.w_max[k] + shift;
      p.b_ie[r + 1] = -(w_r.w_min[k] + shift);
      r += 2;
      cnt.geometric += 2;
    }
  // (x + z tan g) <= x_O + z_O tan g and (x - z tan g) >= x_O - z_O tan g, likewise for y.
  const double tg = std::tan(cone.angle);
  for (int a = 0; a < 2; ++a) {
    for (int i = 0; i < m; ++i) {
      const double b = bernstein(i, n, cone.tau);
      p.A_ie(r, idx(a, i)) = b;
      p.A_ie(r, idx(2, i)) = b * tg;
      p.A_ie(r + 1, idx(a, i)) = -b;
      p.A_ie(r + 1, idx(2, i)) = b * tg;
    }
    p.b_ie[r] = cone.apex[a] + cone.apex.z() * tg;
    p.b_ie[r + 1] = -(cone.apex[a] - cone.apex.z() * tg);
    r += 2;
    cnt.cone += 2;
  }
  if (r != n_ie) throw PlanError(ErrorCode::DimensionMismatch, "inequality row count mismatch", Stage::EeTrajectory);
  if (counts) *counts = cnt;
  return p;
}

std::vector<Vec3> fit_quad_window(const PiecewiseBezier& quad, double t0, double t1, int degree) {
  std::vector<Vec3> samples;
  for (int j = 0; j <= degree; ++j) samples.push_back(quad.position(t0 + (t1 - t0) * j / degree));
  return fit_bezier(samples, degree);
}

EePlan plan_ee_trajectory(const PiecewiseBezier& quad, double t0, double t1, const EeState& start,
                          const EeState& end, const EePlanConfig& cfg) {
  cfg.limits.validate();
  EePlan plan;
  plan.quad_fit = fit_quad_window(quad, t0, t1, cfg.degree);
  ObstacleMirrorSet mirrors;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const QpProblem qp = build_ee_qp(start, end, plan.quad_fit, cfg.w_r, cfg.psi_O, cfg.limits, cfg.cone, mirrors, t1 - t0);
    const QpSolution sol = solve_qp(qp);
    if (sol.status != QpStatus::Success) {
      throw PlanError(ErrorCode::QpInfeasible,
                      std::string("end-effector QP failed: ") + to_string(sol.status), Stage::EeTrajectory);
    }
    const int m = cfg.degree + 1;
    std::vector<Vec3> cps(m);
    for (int i = 0; i < m; ++i) cps[i] = Vec3(sol.x[i], sol.x[m + i], sol.x[2 * m + i]);
    BezierSegment seg(cps, t0, t1);

    std::vector<CollisionInterval> hits = sweep_collisions(seg, quad, cfg.obstacles, cfg.sweep);
    if (hits.empty()) {
      SweepConfig fine = cfg.sweep;
      fine.dt = cfg.fine_dt;
      hits = sweep_collisions(seg, quad, cfg.obstacles, fine);
    }
    plan.trace.push_back({it, sol.iterations, sol.objective, hits, mirrors});
    for (const CollisionInterval& h : hits)
      spdlog::debug("avoidance iteration {}: obstacle {} t=[{:.4f}, {:.4f}] length {:.3e}", it, h.obstacle_id, h.t_L, h.t_R,
                    h.length());
    if (hits.empty() || !cfg.avoidance) {
      plan.segment = seg;
      plan.converged = hits.empty();
      return plan;
    }
    mirrors = update_weights(mirrors, hits, cfg.obstacles, cfg.alpha);
  }
  throw PlanError(ErrorCode::NoConvergence, "collision avoidance did not converge", Stage::EeTrajectory);
}

}  // namespace pickplan
