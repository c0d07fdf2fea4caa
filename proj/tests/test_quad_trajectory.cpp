#include <cmath>

#include "doctest.h"
#include "pickplan/error.hpp"
#include "pickplan/quad_trajectory.hpp"
#include "test_support.hpp"

using namespace pickplan;

namespace {

struct Sweep {
  double max_v = 0.0;
  double max_a = 0.0;
  double worst_cell = -1.0;  // largest violation of the owning cell
};

Sweep sweep(const PiecewiseBezier& c, const Corridor& cor, double dt) {
  Sweep s;
  const int steps = static_cast<int>(std::ceil((c.t_end() - c.t_begin()) / dt));
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(c.t_end(), c.t_begin() + k * dt);
    const auto st = c.eval(t);
    s.max_v = std::max(s.max_v, st.velocity.cwiseAbs().maxCoeff());
    s.max_a = std::max(s.max_a, st.acceleration.cwiseAbs().maxCoeff());
    s.worst_cell = std::max(s.worst_cell, cor.cells[c.segment_index(t)].max_violation(st.position));
  }
  return s;
}

Corridor obstacle_corridor(Vec3& s, Vec3& t) {
  GridMap3D raw(Vec3::Zero(), 0.1, {40, 30, 20});
  raw.fill_box(Aabb(Vec3(1.5, 0.0, 0.0), Vec3(2.5, 2.0, 2.0)));
  const GridMap3D free_space = raw.inflated(0.3);
  s = Vec3(0.6, 0.6, 1.0);
  t = Vec3(3.4, 0.6, 1.0);
  return generate_corridor(free_space, astar(raw, s, t, 0.3), s, t, QuadLimits{});
}

}  // namespace

TEST_CASE("single cell rest-to-rest line is a symmetric S-curve") {
  Corridor cor;
  append_cell(cor, HalfspacePolytope::from_aabb(Aabb(Vec3(-1, -1, -1), Vec3(3, 1, 1))), 10.0);
  const Vec3 a(0, 0, 0), b(2, 0, 0);
  const auto c = generate_quad_trajectory(cor, a, b, QuadLimits{});
  CHECK((c.position(0.0) - a).norm() < 1e-9);
  REQUIRE(c.t_end() == 10.0);
  CHECK((c.position(10.0) - b).norm() < 1e-9);
  for (int k = 0; k <= 50; ++k) {
    const double t = 0.2 * k;
    CHECK((c.position(t) + c.position(10.0 - t) - (a + b)).norm() < 1e-8);
    CHECK(std::abs(c.position(t).y()) < 1e-9);
  }
  CHECK(c.eval(0.0).velocity.norm() < 1e-9);
  CHECK(c.eval(10.0).acceleration.norm() < 1e-9);
}

TEST_CASE("multi-cell corridor: containment, limits, continuity, endpoints") {
  Vec3 s, t;
  const Corridor cor = obstacle_corridor(s, t);
  REQUIRE(cor.size() >= 3);
  QuadSolveInfo info;
  QuadLeg leg;
  leg.corridor = cor;
  leg.bounds.assign(cor.size(), DerivativeBounds{0.5, 1.0});
  leg.p_start = s;
  leg.p_goal = t;
  const auto c = generate_quad_trajectory(leg, {}, &info);
  CHECK(info.axis_separable);
  CHECK(info.kkt_max < 1e-6);
  CHECK(c.segments().size() == cor.size());
  CHECK((c.position(c.t_begin()) - s).norm() < 1e-9);
  CHECK((c.position(c.t_end()) - t).norm() < 1e-9);
  CHECK(c.continuity_error() < 1e-6);
  const Sweep sw = sweep(c, cor, 1e-3);
  CHECK(sw.worst_cell <= 1e-6);
  CHECK(sw.max_v <= 0.5 + 1e-6);
  CHECK(sw.max_a <= 1.0 + 1e-6);

  // Control-point bounds dominate the sampled extrema.
  for (const auto& seg : c.segments()) {
    double cp_v = 0.0;
    for (const auto& d : derivative_control_points(seg.control_points(), 1, seg.duration()))
      cp_v = std::max(cp_v, d.cwiseAbs().maxCoeff());
    double sampled = 0.0;
    for (int k = 0; k <= 200; ++k)
      sampled = std::max(sampled, seg.eval(seg.t0() + seg.duration() * k / 200.0).velocity.cwiseAbs().maxCoeff());
    CHECK(cp_v >= sampled - 1e-12);
  }
}

TEST_CASE("aggressive durations trigger rescaling retries") {
  Corridor cor;
  append_cell(cor, HalfspacePolytope::from_aabb(Aabb(Vec3(-1, -1, -1), Vec3(3, 1, 1))), 1.0);
  QuadLeg leg;
  leg.corridor = cor;
  leg.bounds.assign(1, DerivativeBounds{0.5, 1.0});
  leg.p_goal = Vec3(0.6, 0.0, 0.0);
  QuadSolveInfo info;
  const auto c = generate_quad_trajectory(leg, {}, &info);
  CHECK(info.retries >= 1);
  CHECK(info.durations[0] > 1.0);
  const Sweep sw = sweep(c, cor, 1e-3);
  CHECK(sw.max_v <= 0.5 + 1e-6);
  CHECK(sw.max_a <= 1.0 + 1e-6);

  leg.fixed_duration = {true};
  try {
    (void)generate_quad_trajectory(leg);
    FAIL("expected QpInfeasible");
  } catch (const PlanError& e) {
    CHECK(e.code() == ErrorCode::QpInfeasible);
    CHECK(e.stage() == Stage::QuadTrajectory);
  }
}

TEST_CASE("rotated designed cell uses the coupled QP") {
  const RevisedWorkspace w;
  const Vec3 p_f(1.0, 0.0, 0.0);
  Corridor cor;
  append_cell(cor, HalfspacePolytope::from_aabb(Aabb(Vec3(-0.5, -0.5, -0.5), Vec3(1.02, 0.5, 0.5))), 4.0);
  append_cell(cor, designed_polyhedron(p_f, 0.6, w), 0.5);
  QuadLeg leg;
  leg.corridor = cor;
  leg.bounds = {DerivativeBounds{0.5, 1.0}, manipulation_bounds(Vec3(0, 0, -0.6), 0.06, 0.5, 2.0, QuadLimits{})};
  leg.fixed_duration = {false, true};
  leg.p_goal = p_f;
  QuadSolveInfo info;
  const auto c = generate_quad_trajectory(leg, {}, &info);
  CHECK_FALSE(info.axis_separable);
  CHECK(sweep(c, cor, 1e-3).worst_cell <= 1e-6);
  CHECK((c.position(c.t_end()) - p_f).norm() < 1e-9);
  const auto& last = c.segments().back();
  for (int o = 1; o <= 4; ++o) {
    const double lim[5] = {0, leg.bounds[1].v, leg.bounds[1].a, leg.bounds[1].j, leg.bounds[1].s};
    for (const auto& d : derivative_control_points(last.control_points(), o, last.duration()))
      CHECK(d.cwiseAbs().maxCoeff() <= lim[o] + 1e-6);
  }
}

TEST_CASE("manipulation bounds for the default workspace") {
  const auto b = manipulation_bounds(Vec3(0, 0, -0.6), 0.06, 0.5, 2.0, QuadLimits{});
  const double lever = std::sqrt(2.0) * 0.6;
  CHECK(b.v == doctest::Approx(0.25));
  CHECK(b.a == doctest::Approx(0.03 * 9.81 / (lever + 0.03)).epsilon(1e-12));
  CHECK(b.a == doctest::Approx(0.33496).epsilon(1e-4));
  CHECK(b.j == doctest::Approx(0.125 * 9.81 / lever).epsilon(1e-12));
  CHECK(b.s == doctest::Approx(0.8 * 9.81 / lever).epsilon(1e-12));
  // Worst tilt offset of the extended arm at b.a stays within half the width.
  CHECK(lever * b.a / (kGravity - b.a) <= 0.03 + 1e-12);
}

TEST_CASE("hold segment is constant") {
  const auto h = hold_segment(Vec3(1, 2, 3), 4.0, 1.0);
  CHECK((h.position(4.5) - Vec3(1, 2, 3)).norm() < 1e-15);
  CHECK(h.eval(4.7).velocity.norm() == 0.0);
}
