#include <cmath>
#include <random>

#include "doctest.h"
#include "pickplan/delta_arm.hpp"
#include "pickplan/geometry.hpp"
#include "pickplan/lp.hpp"
#include "test_support.hpp"

using namespace pickplan;

TEST_CASE("yaw_rotation identity and quarter turn") {
  CHECK(yaw_rotation(0.0).isApprox(RotMat3::Identity(), 0.0));
  const RotMat3 r = yaw_rotation(M_PI / 2);
  CHECK((r.col(0) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((r.col(1) - Vec3(-1, 0, 0)).norm() < 1e-15);
  CHECK((r.col(2) - Vec3(0, 0, 1)).norm() == 0.0);
}

TEST_CASE("yaw_rotation is orthonormal and inverted by the opposite angle") {
  const RotMat3 r = yaw_rotation(0.3);
  CHECK((r * r.transpose() - RotMat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const double psi = test::random_real(rng, -10.0, 10.0);
    CHECK((yaw_rotation(psi) * yaw_rotation(-psi) - RotMat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("polytope_contains on the unit cube") {
  const auto cube = HalfspacePolytope::from_aabb(Aabb(Vec3(-1, -1, -1), Vec3(1, 1, 1)));
  CHECK(polytope_contains(cube, Vec3::Zero(), 0.0));
  CHECK_FALSE(polytope_contains(cube, Vec3(2, 0, 0), 0.0));
  CHECK(polytope_contains(cube, Vec3(1.0 + 5e-7, 0, 0), 1e-6));
}

TEST_CASE("rows are normalized so tolerance is metric") {
  Eigen::MatrixX3d a(1, 3);
  a << 0.0, 0.0, 10.0;
  Eigen::VectorXd b(1);
  b << 10.0;
  const HalfspacePolytope p(a, b);
  CHECK(p.A().row(0).norm() == doctest::Approx(1.0));
  CHECK(p.max_violation(Vec3(0, 0, 1.25)) == doctest::Approx(0.25));
}

TEST_CASE("polytope from an Aabb contains its own vertices") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 lo = test::random_vec(rng, -2, 0);
    const Vec3 hi = lo + test::random_vec(rng, 0, 2);
    const Aabb box(lo, hi);
    const auto poly = HalfspacePolytope::from_aabb(box);
    for (const auto& v : aabb_vertices(box).vertices) {
      CHECK(polytope_contains(poly, v, 1e-12));
      CHECK(box.contains(v));
    }
  }
}

TEST_CASE("aabb_vertices") {
  const auto unit = aabb_vertices(Aabb(Vec3::Zero(), Vec3::Ones()));
  REQUIRE(unit.vertices.size() == 8);
  int seen = 0;
  for (const auto& v : unit.vertices) {
    CHECK(((v.array() == 0.0) || (v.array() == 1.0)).all());
    seen |= 1 << static_cast<int>(v.x() + 2 * v.y() + 4 * v.z());
  }
  CHECK(seen == 255);
  const Vec3 c(0.3, -0.2, 4.0);
  for (const auto& v : aabb_vertices(Aabb(c, c)).vertices) CHECK(v == c);
}

namespace {

// Point-in-hull by LP feasibility over convex weights.
bool in_vertex_hull(const std::vector<Vec3>& verts, const Vec3& p) {
  const int k = static_cast<int>(verts.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 8, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 8);
  for (int j = 0; j < k; ++j) {
    a(j, j) = -1.0;
    for (int r = 0; r < 3; ++r) {
      a(k + r, j) = verts[j](r);
      a(k + 3 + r, j) = -verts[j](r);
    }
    a(k + 6, j) = 1.0;
    a(k + 7, j) = -1.0;
  }
  for (int r = 0; r < 3; ++r) {
    b(k + r) = p(r);
    b(k + 3 + r) = -p(r);
  }
  b(k + 6) = 1.0;
  b(k + 7) = -1.0;
  return solve_lp(Eigen::VectorXd::Zero(k), a, b).status == LpStatus::Optimal;
}

}  // namespace

TEST_CASE("random hull polytope membership matches the vertex-hull LP oracle") {
  std::mt19937_64 rng(7);
  std::vector<Vec3> verts;
  for (int i = 0; i < 12; ++i) verts.push_back(test::random_vec(rng, -1, 1));
  const HalfspacePolytope poly = convex_hull_halfspaces(verts, 5);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = test::random_vec(rng, -1.2, 1.2);
    if (std::abs(poly.max_violation(p)) < 1e-7) continue;
    CHECK(polytope_contains(poly, p, 0.0) == in_vertex_hull(verts, p));
    ++checked;
  }
  CHECK(checked > 990);
}

TEST_CASE("shrunk and translated polytopes") {
  const auto cube = HalfspacePolytope::from_aabb(Aabb(Vec3(-1, -1, -1), Vec3(1, 1, 1)));
  CHECK(polytope_contains(cube.shrunk(0.1), Vec3(0.89, 0, 0)));
  CHECK_FALSE(polytope_contains(cube.shrunk(0.1), Vec3(0.91, 0, 0)));
  CHECK(polytope_contains(cube.translated(Vec3(5, 0, 0)), Vec3(5.9, 0, 0)));
  CHECK(cube.axis_aligned());
  CHECK_FALSE(HalfspacePolytope(Eigen::RowVector3d(1, 1, 0), Eigen::VectorXd::Ones(1)).axis_aligned());
}
