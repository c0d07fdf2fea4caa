#include <cmath>
#include <random>

#include "doctest.h"
#include "pickplan/error.hpp"
#include "pickplan/feasibility.hpp"
#include "test_support.hpp"

using namespace pickplan;

namespace {

const HalfspacePolytope& default_workspace() {
  static const HalfspacePolytope w = approximate_workspace(DeltaParams{}, JointLimits{}, 1728, 42);
  return w;
}

MountTransform identity_mount() {
  MountTransform m;
  m.R_D_B = RotMat3::Identity();
  m.p_C_B = Vec3::Zero();
  return m;
}

}  // namespace

TEST_CASE("untilted workspace with identity mount is unchanged") {
  const auto& w = default_workspace();
  const auto t = tilted_workspace(w, identity_mount(), 0.0, 0.0);
  CHECK((t.A() - w.A()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((t.b() - w.b()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pure mount offset translates the workspace") {
  const auto& w = default_workspace();
  MountTransform m = identity_mount();
  m.p_C_B = Vec3(0.1, -0.2, 0.3);
  const auto t = tilted_workspace(w, m, 0.0, 0.0);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = test::random_vec(rng, -0.5, 0.8);
    if (std::abs(w.max_violation(p)) < 1e-9) continue;
    CHECK(polytope_contains(t, p + m.p_C_B) == polytope_contains(w, p));
  }
}

TEST_CASE("tilted workspace equals the mapped set") {
  const auto& w = default_workspace();
  const MountTransform m;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const double th = test::random_real(rng, -0.3, 0.3);
    const double ph = test::random_real(rng, -0.3, 0.3);
    const auto t = tilted_workspace(w, m, th, ph);
    const RotMat3 r = tilt_rotation(th, ph);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 p = test::random_vec(rng, -0.5, 0.5) + Vec3(0, 0, -0.5);
      const Vec3 pre = m.R_D_B.transpose() * (r.transpose() * p - m.p_C_B);
      if (std::abs(w.max_violation(pre)) < 1e-9) continue;
      CHECK(polytope_contains(t, p) == polytope_contains(w, pre));
    }
  }
}

TEST_CASE("zero tilt bounds give the untilted membership") {
  const auto& w = default_workspace();
  const MountTransform m;
  TiltBounds zero{0.0, 0.0, 0.0, 0.0};
  const auto w_i = workspace_intersection(w, m, zero);
  const auto w0 = tilted_workspace(w, m, 0.0, 0.0);
  CHECK(w_i.rows() == 4 * w0.rows());
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p = test::random_vec(rng, -0.4, 0.4) + Vec3(0, 0, -0.5);
    CHECK(polytope_contains(w_i, p) == polytope_contains(w0, p));
  }
}

TEST_CASE("intersection membership is the conjunction of the four boundary tilts") {
  const auto& w = default_workspace();
  const MountTransform m;
  const TiltBounds tilts{-0.12, 0.2, -0.15, 0.1};
  const auto w_i = workspace_intersection(w, m, tilts);
  const auto a = tilted_workspace(w, m, tilts.theta_min, 0.0);
  const auto b = tilted_workspace(w, m, tilts.theta_max, 0.0);
  const auto c = tilted_workspace(w, m, 0.0, tilts.phi_min);
  const auto d = tilted_workspace(w, m, 0.0, tilts.phi_max);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p = test::random_vec(rng, -0.3, 0.3) + Vec3(0, 0, -0.5);
    const bool all = polytope_contains(a, p) && polytope_contains(b, p) && polytope_contains(c, p) &&
                     polytope_contains(d, p);
    CHECK(polytope_contains(w_i, p) == all);
  }
}

TEST_CASE("enlarging tilt bounds never enlarges the intersection") {
  const auto& w = default_workspace();
  const MountTransform m;
  const auto small = workspace_intersection(w, m, TiltBounds{-0.05, 0.05, -0.05, 0.05});
  const auto large = workspace_intersection(w, m, TiltBounds{-0.2, 0.2, -0.2, 0.2});
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = test::random_vec(rng, -0.3, 0.3) + Vec3(0, 0, -0.5);
    if (polytope_contains(large, p)) CHECK(polytope_contains(small, p));
  }
}

TEST_CASE("disjoint tilted workspaces raise EmptyIntersection") {
  const auto box = HalfspacePolytope::from_aabb(Aabb(Vec3(0.9, -0.01, -0.01), Vec3(1.0, 0.01, 0.01)));
  try {
    workspace_intersection(box, identity_mount(), TiltBounds{-1.2, 1.2, 0.0, 0.0});
    FAIL("expected EmptyIntersection");
  } catch (const PlanError& e) {
    CHECK(e.code() == ErrorCode::EmptyIntersection);
  }
}

TEST_CASE("inscribed cuboid of a box is the box") {
  const Aabb box(Vec3(-0.1, 0.2, -0.7), Vec3(0.3, 0.25, -0.4));
  const RevisedWorkspace r = inscribed_cuboid(HalfspacePolytope::from_aabb(box));
  CHECK((r.w_min - box.l_min).norm() < 1e-12);
  CHECK((r.w_max - box.l_max).norm() < 1e-12);
}

TEST_CASE("inscribed cuboid of the octahedron beats 0.9 of a grid search") {
  Eigen::MatrixX3d a(8, 3);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(8);
  for (int i = 0; i < 8; ++i) a.row(i) << ((i & 1) ? 1 : -1), ((i & 2) ? 1 : -1), ((i & 4) ? 1 : -1);
  const HalfspacePolytope oct(a, b);
  const RevisedWorkspace r = inscribed_cuboid(oct);
  CHECK(cuboid_violation(oct, r) <= 1e-9);
  const Vec3 e = r.w_max - r.w_min;
  const double volume = e.prod();

  double best = 0.0;
  for (int cx = -2; cx <= 2; ++cx)
    for (int cy = -2; cy <= 2; ++cy)
      for (int cz = -2; cz <= 2; ++cz) {
        const Vec3 c(0.1 * cx, 0.1 * cy, 0.1 * cz);
        for (int hx = 1; hx <= 50; ++hx)
          for (int hy = 1; hy <= 50; ++hy) {
            // Largest feasible hz on the grid (feasibility is monotone in hz).
            int lo = 0, hi = 50;
            while (lo < hi) {
              const int mid = (lo + hi + 1) / 2;
              const Vec3 h(0.02 * hx, 0.02 * hy, 0.02 * mid);
              if (cuboid_violation(oct, RevisedWorkspace{c - h, c + h}) <= 0.0) lo = mid; else hi = mid - 1;
            }
            best = std::max(best, 8.0 * 0.02 * hx * 0.02 * hy * 0.02 * lo);
          }
      }
  CHECK(best > 0.0);
  CHECK(volume >= 0.9 * best);
}

TEST_CASE("default operating bounds fit inside the default-geometry intersection") {
  const auto w_i = workspace_intersection(default_workspace(), MountTransform{}, TiltBounds{});
  const RevisedWorkspace nominal{Vec3(-0.06, -0.06, -0.60), Vec3(0.06, 0.06, -0.40)};
  CHECK(cuboid_violation(w_i, nominal) <= 0.0);
  const RevisedWorkspace best = inscribed_cuboid(w_i);
  CHECK(cuboid_violation(w_i, best) <= 1e-9);
  CHECK((best.w_max - best.w_min).sum() >= (nominal.w_max - nominal.w_min).sum());
}

TEST_CASE("geometric feasibility predicate") {
  const RevisedWorkspace w;
  const Vec3 p_B(1.0, 2.0, 3.0);
  CHECK(geometric_feasibility_ok(p_B + w.center(), p_B, 0.0, w));
  CHECK_FALSE(geometric_feasibility_ok(p_B + w.w_max + Vec3(0.01, 0, 0), p_B, 0.0, w, 0.0));

  const RevisedWorkspace asym{Vec3(0.1, -0.02, -0.6), Vec3(0.2, 0.02, -0.4)};
  const Vec3 rotated = yaw_rotation(M_PI / 2) * asym.center();
  CHECK(geometric_feasibility_ok(p_B + rotated, p_B, M_PI / 2, asym));
  CHECK_FALSE(geometric_feasibility_ok(p_B + asym.center(), p_B, M_PI / 2, asym));
}

TEST_CASE("yaw equivariance of the predicate") {
  const RevisedWorkspace w;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec3 d = w.center() + test::random_vec(rng, -0.12, 0.12);
    const Vec3 p_B = test::random_vec(rng, -3, 3);
    const bool ref = geometric_feasibility_ok(p_B + d, p_B, 0.0, w);
    const double psi = test::random_real(rng, -M_PI, M_PI);
    CHECK(geometric_feasibility_ok(p_B + yaw_rotation(psi) * d, p_B, psi, w) == ref);
  }
}
