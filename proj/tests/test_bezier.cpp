#include <cmath>
#include <random>

#include "doctest.h"
#include "pickplan/bezier.hpp"
#include "pickplan/error.hpp"
#include "pickplan/gjk.hpp"
#include "test_support.hpp"

using namespace pickplan;

namespace {

std::vector<Vec3> random_cps(std::mt19937_64& rng, int n) {
  std::vector<Vec3> cps(n + 1);
  for (auto& c : cps) c = test::random_vec(rng, -2.0, 2.0);
  return cps;
}

Vec3 basis_sum(const std::vector<Vec3>& cps, double tau) {
  const int n = static_cast<int>(cps.size()) - 1;
  Vec3 p = Vec3::Zero();
  for (int i = 0; i <= n; ++i) p += bernstein(i, n, tau) * cps[i];
  return p;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("bernstein endpoints, partition of unity and nonnegativity") {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 12; ++n) {
    CHECK(bernstein(0, n, 0.0) == 1.0);
    CHECK(bernstein(n, n, 1.0) == 1.0);
    for (int k = 0; k < 20; ++k) {
      const double tau = test::random_real(rng, 0.0, 1.0);
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double b = bernstein(i, n, tau);
        CHECK(b >= 0.0);
        sum += b;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("b_{2,5}(0.3) matches the rational value") {
  // 10 * (3/10)^2 * (7/10)^3 = 30870 / 100000
  CHECK(std::abs(bernstein(2, 5, 0.3) - 0.3087) < 1e-15);
}

TEST_CASE("binomials match factorial ratios up to n = 20") {
  for (int n = 0; n <= 20; ++n)
    for (int k = 0; k <= n; ++k)
      CHECK(binomial(n, k) == std::round(factorial(n) / (factorial(k) * factorial(n - k))));
}

TEST_CASE("derivative control points of trivial curves") {
  const std::vector<Vec3> constant(6, Vec3(1.0, -2.0, 3.0));
  for (int k = 1; k <= 5; ++k)
    for (const auto& d : derivative_control_points(constant, k, 0.7)) CHECK(d.norm() == 0.0);
  const std::vector<Vec3> line{Vec3::Zero(), Vec3(1.0, 1.0, 1.0)};
  const auto d = derivative_control_points(line, 1, 1.0);
  REQUIRE(d.size() == 1);
  CHECK((d[0] - Vec3(1.0, 1.0, 1.0)).norm() == 0.0);
  CHECK_THROWS_AS(derivative_control_points(line, 2, 1.0), PlanError);
}

TEST_CASE("evaluated derivatives match central finite differences") {
  std::mt19937_64 rng(2);
  const double h = 1e-5;
  for (int c = 0; c < 20; ++c) {
    const double t0 = test::random_real(rng, -1.0, 1.0);
    const double s = test::random_real(rng, 0.5, 3.0);
    const BezierSegment seg(random_cps(rng, 7), t0, t0 + s);
    for (int k = 0; k < 50; ++k) {
      const double t = test::random_real(rng, t0 + 2 * h, t0 + s - 2 * h);
      const CurveState st = seg.eval(t);
      const CurveState lo = seg.eval(t - h), hi = seg.eval(t + h);
      const Vec3 v_fd = (seg.position(t + h) - seg.position(t - h)) / (2 * h);
      CHECK((st.velocity - v_fd).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + st.velocity.norm()));
      CHECK((st.acceleration - (hi.velocity - lo.velocity) / (2 * h)).cwiseAbs().maxCoeff() <
            1e-6 * (1.0 + st.acceleration.norm()));
      CHECK((st.jerk - (hi.acceleration - lo.acceleration) / (2 * h)).cwiseAbs().maxCoeff() <
            1e-6 * (1.0 + st.jerk.norm()));
    }
  }
}

TEST_CASE("de Casteljau matches the basis sum and interpolates endpoints") {
  std::mt19937_64 rng(3);
  for (int c = 0; c < 30; ++c) {
    const int n = 1 + c % 10;
    const auto cps = random_cps(rng, n);
    const BezierSegment seg(cps, 1.0, 3.0);
    CHECK((seg.position(1.0) - cps.front()).norm() == 0.0);
    CHECK((seg.position(3.0) - cps.back()).norm() < 1e-15);
    for (int k = 0; k < 20; ++k) {
      const double tau = test::random_real(rng, 0.0, 1.0);
      CHECK((seg.position(1.0 + 2.0 * tau) - basis_sum(cps, tau)).norm() < 1e-12);
    }
  }
}

TEST_CASE("endpoint velocity identities") {
  std::mt19937_64 rng(4);
  const auto cps = random_cps(rng, 7);
  const BezierSegment seg(cps, 0.0, 1.5);
  CHECK((seg.eval(0.0).velocity - 7.0 * (cps[1] - cps[0]) / 1.5).norm() < 1e-12);
  CHECK((seg.eval(1.5).velocity - 7.0 * (cps[7] - cps[6]) / 1.5).norm() < 1e-12);
}

TEST_CASE("constant segment has zero derivatives") {
  const BezierSegment seg(std::vector<Vec3>(8, Vec3(0.3, 0.2, 0.1)), 0.0, 1.0);
  const auto st = seg.eval(0.37);
  CHECK((st.position - Vec3(0.3, 0.2, 0.1)).norm() < 1e-15);
  CHECK(st.velocity.norm() == 0.0);
  CHECK(st.acceleration.norm() == 0.0);
  CHECK(st.jerk.norm() == 0.0);
}

TEST_CASE("evaluation outside the segment throws OutOfDomain") {
  const BezierSegment seg(std::vector<Vec3>(4, Vec3::Zero()), 0.0, 1.0);
  try {
    (void)seg.eval(1.01);
    FAIL("expected throw");
  } catch (const PlanError& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("curve points lie in the control-point hull") {
  std::mt19937_64 rng(5);
  const auto cps = random_cps(rng, 7);
  const BezierSegment seg(cps, 0.0, 1.0);
  const ConvexPolyhedronV hull{cps};
  for (int k = 0; k < 1000; ++k) {
    const ConvexPolyhedronV pt{{seg.position(test::random_real(rng, 0.0, 1.0))}};
    CHECK(gjk_query(hull, pt).distance <= 1e-9);
  }
}

TEST_CASE("fit_bezier round trip and trivial fits") {
  std::mt19937_64 rng(6);
  for (int c = 0; c < 10; ++c) {
    const auto cps = random_cps(rng, 7);
    std::vector<Vec3> samples;
    for (int j = 0; j <= 7; ++j) samples.push_back(de_casteljau(cps, j / 7.0));
    const auto fit = fit_bezier(samples, 7);
    for (int i = 0; i <= 7; ++i) CHECK((fit[i] - cps[i]).norm() < 1e-9);
  }
  const auto constant = fit_bezier(std::vector<Vec3>(8, Vec3(1, 2, 3)), 7);
  for (const auto& c : constant) CHECK((c - Vec3(1, 2, 3)).norm() < 1e-12);
  std::vector<Vec3> line;
  for (int j = 0; j <= 7; ++j) line.push_back(Vec3(0, 0, 1) + (j / 7.0) * Vec3(7, -7, 14));
  const auto fl = fit_bezier(line, 7);
  for (int i = 0; i <= 7; ++i) CHECK((fl[i] - (Vec3(0, 0, 1) + i * Vec3(1, -1, 2))).norm() < 1e-10);
  CHECK_THROWS_AS(fit_bezier(line, 6), PlanError);
}

TEST_CASE("jerk Hessian matches numeric quadrature") {
  std::mt19937_64 rng(7);
  for (int c = 0; c < 10; ++c) {
    const int n = 3 + c % 6;
    const double s = test::random_real(rng, 0.3, 2.0);
    const auto cps = random_cps(rng, n);
    const BezierSegment seg(cps, 0.0, s);
    // Composite Simpson on a polynomial of degree 2(n-3) <= 10.
    const int m = 2000;
    double integral = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      integral += w * seg.eval(s * k / m).jerk.squaredNorm();
    }
    integral *= s / (3.0 * m);
    const Eigen::MatrixXd hess = jerk_hessian(n, s);
    double quad = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::VectorXd x(n + 1);
      for (int i = 0; i <= n; ++i) x[i] = cps[i][axis];
      quad += x.dot(hess * x);
    }
    CHECK(quad == doctest::Approx(integral).epsilon(1e-8));
    CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() < 1e-9 * hess.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("piecewise curve indexing and continuity error") {
  const BezierSegment a({Vec3::Zero(), Vec3(1, 0, 0)}, 0.0, 1.0);
  const BezierSegment b({Vec3(1, 0, 0), Vec3(2, 0, 0)}, 1.0, 2.0);
  PiecewiseBezier pw({a, b});
  CHECK(pw.segment_index(0.5) == 0);
  CHECK(pw.segment_index(1.0) == 1);
  CHECK(pw.segment_index(2.0) == 1);
  CHECK(pw.continuity_error() < 1e-15);
  CHECK((pw.position(1.5) - Vec3(1.5, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(pw.eval(2.1), PlanError);
  CHECK_THROWS_AS(pw.append(BezierSegment({Vec3::Zero(), Vec3::Zero()}, 3.0, 4.0)), PlanError);
}
