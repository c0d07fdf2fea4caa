#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "pickplan/ee_trajectory.hpp"
#include "pickplan/error.hpp"
#include "pickplan/grid_planner.hpp"
#include "test_support.hpp"

using namespace pickplan;

namespace {

const Vec3 kBase(0.0, 0.0, 1.0);
const Vec3 kTop(0.0, 0.0, -0.54);

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const PlanError& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

struct HoverCase {
  PiecewiseBezier quad = hold_segment(kBase, 0.0, 2.0);
  RevisedWorkspace w;
  EeState start, end;
  EePlanConfig cfg;
  HoverCase() {
    start.p = kBase + kTop;
    end.p = kBase + w.center();
    cfg.cone.apex = end.p;
    cfg.sweep.r_S = 0.1;
    cfg.sweep.l_C = 0.02;
    cfg.sweep.box = local_map_box(kBase, end.p, 0.2);
  }
};

ArmObstacle box_obstacle(int id, const Vec3& lo, const Vec3& hi) { return {id, aabb_vertices(Aabb(lo, hi))}; }

}  // namespace

TEST_CASE("manipulation start time") {
  CHECK(manipulation_start_time(10.0, EeLimits{0.5, 2.0}) == doctest::Approx(9.5).epsilon(1e-15));
  CHECK(manipulation_start_time(5.0, EeLimits{0.7, 0.7}) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(code_of([] { (void)manipulation_start_time(0.1, EeLimits{0.5, 2.0}); }) == ErrorCode::NegativeWindow);
}

TEST_CASE("flat attitude") {
  const RotMat3 hover = flat_attitude(Vec3::Zero(), 0.0);
  CHECK((hover.col(2) - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((hover.col(1) - Vec3::UnitY()).norm() < 1e-15);
  CHECK((hover.col(0) - Vec3::UnitX()).norm() < 1e-15);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Vec3 a = test::random_vec(rng, -2.0, 2.0);
    const RotMat3 r = flat_attitude(a, test::random_real(rng, -M_PI, M_PI));
    CHECK((r.transpose() * r - RotMat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.col(2).cross((a + kGravity * Vec3::UnitZ()).normalized()).norm() < 1e-12);
  }
  CHECK(code_of([] { (void)flat_attitude(Vec3(0, 0, -kGravity), 0.0); }) == ErrorCode::Singular);
  CHECK(code_of([] { (void)flat_attitude(Vec3(5.0, 0, -kGravity), 0.0); }) == ErrorCode::Singular);
}

TEST_CASE("initial state from the quad trajectory") {
  const auto hover = hold_segment(kBase, 0.0, 2.0);
  const EeState h = initial_state(hover, 1.0, kTop, 0.0, 1e-3);
  CHECK((h.p - (kBase + kTop)).norm() < 1e-15);
  CHECK(h.v.norm() < 1e-12);
  CHECK(h.a.norm() < 1e-6);

  const Vec3 vel(0.2, -0.1, 0.05);
  const PiecewiseBezier line({BezierSegment({kBase, kBase + 2.0 * vel}, 0.0, 2.0)});
  const EeState l = initial_state(line, 1.0, kTop, 0.3, 1e-3);
  CHECK((l.v - vel).norm() < 1e-9);
  CHECK(l.a.norm() < 1e-6);

  std::mt19937_64 rng(2);
  std::vector<Vec3> cps(8);
  for (auto& c : cps) c = test::random_vec(rng, -0.3, 0.3);
  const PiecewiseBezier curve({BezierSegment(cps, 0.0, 2.0)});
  const double t = 1.1, psi = 0.4;
  const double h_ref = 1e-5;
  const Vec3 v_true = (retracted_ee_position(curve, t + h_ref, kTop, psi) -
                       retracted_ee_position(curve, t - h_ref, kTop, psi)) / (2 * h_ref);
  const double e1 = (initial_state(curve, t, kTop, psi, 2e-3).v - v_true).norm();
  const double e2 = (initial_state(curve, t, kTop, psi, 1e-3).v - v_true).norm();
  CHECK(e1 > 0.0);
  CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("end-effector QP structure") {
  HoverCase hc;
  const auto fit = fit_quad_window(hc.quad, 1.5, 2.0, 7);
  EeQpCounts counts;
  const QpProblem p = build_ee_qp(hc.start, hc.end, fit, hc.w, 0.0, EeLimits{}, hc.cfg.cone, {}, 0.5, &counts);
  CHECK(counts.equalities == 18);
  CHECK(counts.velocity == 2 * 3 * 7);
  CHECK(counts.acceleration == 2 * 3 * 6);
  CHECK(counts.geometric == 6 * 8);
  CHECK(counts.cone == 4);
  CHECK(counts.inequalities() == ee_inequality_rows(7));
  CHECK(p.A_ie.rows() == 130);
  CHECK(p.q.norm() == 0.0);
  Eigen::MatrixXd h = jerk_hessian(7, 0.5);
  h /= h.diagonal().mean();
  for (int a = 0; a < 3; ++a) CHECK((p.Q.block(8 * a, 8 * a, 8, 8) - 2.0 * h).norm() < 1e-12);
  CHECK(p.Q.block(0, 8, 8, 8).norm() == 0.0);

  const auto sol = solve_qp(p);
  REQUIRE(sol.status == QpStatus::Success);
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(sol.x[i]) < 1e-6);
    CHECK(std::abs(sol.x[8 + i]) < 1e-6);
  }
}

TEST_CASE("mirror terms change the objective and the re-solve improves on the old point") {
  HoverCase hc;
  const auto fit = fit_quad_window(hc.quad, 1.5, 2.0, 7);
  const QpProblem p0 = build_ee_qp(hc.start, hc.end, fit, hc.w, 0.0, EeLimits{}, hc.cfg.cone, {}, 0.5);
  const auto s0 = solve_qp(p0);
  REQUIRE(s0.status == QpStatus::Success);
  const ObstacleMirrorSet mirrors{{1, Vec3(-0.05, 0.0, 0.45), 0.5}};
  const QpProblem p1 = build_ee_qp(hc.start, hc.end, fit, hc.w, 0.0, EeLimits{}, hc.cfg.cone, mirrors, 0.5);
  const auto s1 = solve_qp(p1);
  REQUIRE(s1.status == QpStatus::Success);
  CHECK(qp_objective(p1, s0.x) > s1.objective);
  double mean_x = 0.0;
  for (int i = 0; i < 8; ++i) mean_x += s1.x[i] / 8.0;
  CHECK(mean_x < -1e-4);
}

TEST_CASE("obstacle-free plan converges in one iteration and meets its constraints") {
  HoverCase hc;
  const auto plan = plan_ee_trajectory(hc.quad, 1.5, 2.0, hc.start, hc.end, hc.cfg);
  CHECK(plan.trace.size() == 1);
  CHECK(plan.converged);
  const auto& seg = plan.segment;
  CHECK((seg.position(2.0) - hc.end.p).norm() < 1e-6);
  CHECK((seg.position(1.5) - hc.start.p).norm() < 1e-6);
  for (int k = 0; k <= 500; ++k) {
    const double t = 1.5 + 0.5 * k / 500.0;
    const auto st = seg.eval(t);
    CHECK(st.velocity.cwiseAbs().maxCoeff() <= 0.5 + 1e-6);
    CHECK(st.acceleration.cwiseAbs().maxCoeff() <= 2.0 + 1e-6);
    CHECK(geometric_feasibility_excess(st.position, hc.quad.position(t), 0.0, hc.w) <= 1e-6);
  }
  const Vec3 pc = seg.position(1.5 + 0.8 * 0.5);
  const double tg = std::tan(hc.cfg.cone.angle);
  CHECK(std::abs(pc.x() - hc.end.p.x()) <= (hc.end.p.z() - pc.z()) * tg + 1e-6);
  CHECK(std::abs(pc.y() - hc.end.p.y()) <= (hc.end.p.z() - pc.z()) * tg + 1e-6);
}

TEST_CASE("planted obstacle forces extra iterations and is avoided") {
  // Diagonal approach with a thin arm; the obstacle clips the lower gripper
  // corner mid-window but clears the hull at both pinned endpoints.
  HoverCase hc;
  hc.start.p = kBase + Vec3(0.02, 0.0, -0.54);
  hc.cfg.sweep.r_S = 0.01;
  hc.cfg.obstacles = {box_obstacle(4, Vec3(0.0, -0.1, 0.45), Vec3(0.01, -0.019, 0.462))};
  EePlanConfig off = hc.cfg;
  off.avoidance = false;
  const auto naive = plan_ee_trajectory(hc.quad, 1.5, 2.0, hc.start, hc.end, off);
  REQUIRE_FALSE(naive.converged);
  CHECK(naive.trace.back().intervals.at(0).length() > 0.0);

  const auto plan = plan_ee_trajectory(hc.quad, 1.5, 2.0, hc.start, hc.end, hc.cfg);
  CHECK(plan.converged);
  CHECK(plan.trace.size() >= 2);
  SweepConfig fine = hc.cfg.sweep;
  fine.dt = 5e-4;
  CHECK(sweep_collisions(plan.segment, hc.quad, hc.cfg.obstacles, fine).empty());
  for (std::size_t k = 1; k < plan.trace.size(); ++k)
    for (const auto& m : plan.trace[k].mirrors) {
      const auto prev = std::find_if(plan.trace[k - 1].mirrors.begin(), plan.trace[k - 1].mirrors.end(),
                                     [&](const MirrorEntry& e) { return e.obstacle_id == m.obstacle_id; });
      if (prev != plan.trace[k - 1].mirrors.end()) CHECK(m.lambda >= prev->lambda);
    }
}
