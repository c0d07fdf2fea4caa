#include "pickplan/delta_arm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "pickplan/error.hpp"

namespace pickplan {

void DeltaParams::validate() const {
  if (!(l_U > 0 && l_L > 0 && r_F > 0 && r_M > 0 && l_g > 0)) {
    throw PlanError(ErrorCode::SceneError, "Delta lengths must be strictly positive");
  }
  if (!(l_L > std::abs(r_F - r_M))) {
    throw PlanError(ErrorCode::SceneError, "Delta lower arm must exceed |r_F - r_M|");
  }
}

void MountTransform::validate() const {
  if (!is_rotation(R_D_B)) throw PlanError(ErrorCode::SceneError, "R_D_B is not a rotation");
  if (!p_C_B.allFinite()) throw PlanError(ErrorCode::SceneError, "p_C_B is not finite");
}

double arm_plane_angle(int i) { return 2.0 * (i - 1) * M_PI / 3.0; }

Vec3 elbow_point(const DeltaParams& params, double q_i, int i) {
  if (i < 1 || i > 3) throw PlanError(ErrorCode::DimensionMismatch, "arm index must be 1, 2 or 3");
  const double phi = arm_plane_angle(i);
  const double radial = params.r_F - params.r_M + params.l_U * std::cos(q_i);
  return {-radial * std::cos(phi), radial * std::sin(phi), params.l_U * std::sin(q_i)};
}

Vec3 forward_kinematics(const DeltaParams& params, const JointAngles& q) {
  const Vec3 l_G(0.0, 0.0, params.l_g);
  const Vec3 c1 = elbow_point(params, q(0), 1) - l_G;
  const Vec3 c2 = elbow_point(params, q(1), 2) - l_G;
  const Vec3 c3 = elbow_point(params, q(2), 3) - l_G;
  const double d = (c2 - c1).norm();
  if (d < 1e-12) throw PlanError(ErrorCode::NoIntersection, "coincident sphere centers");
  const Vec3 ex = (c2 - c1) / d;
  const double i = ex.dot(c3 - c1);
  Vec3 ey = c3 - c1 - i * ex;
  const double j = ey.norm();
  if (j < 1e-12) throw PlanError(ErrorCode::NoIntersection, "collinear sphere centers");
  ey /= j;
  const Vec3 ez = ex.cross(ey);
  // Equal radii: the radical plane terms cancel.
  const double x = 0.5 * d;
  const double y = (i * i + j * j) / (2.0 * j) - i * x / j;
  const double z2 = params.l_L * params.l_L - x * x - y * y;
  if (z2 < 0.0) throw PlanError(ErrorCode::NoIntersection, "spheres do not intersect");
  const double z = std::sqrt(z2);
  const Vec3 base = c1 + x * ex + y * ey;
  const Vec3 a = base + z * ez;
  const Vec3 b = base - z * ez;
  return a.z() >= b.z() ? a : b;
}

JointAngles inverse_kinematics(const DeltaParams& params, const Vec3& p_E_D) {
  const Vec3 wrist = p_E_D + Vec3(0.0, 0.0, params.l_g);
  const double delta = params.r_F - params.r_M;
  JointAngles q;
  for (int i = 1; i <= 3; ++i) {
    const double phi = arm_plane_angle(i);
    const Vec3 u(-std::cos(phi), std::sin(phi), 0.0);
    const Vec3 d = wrist - delta * u;
    // A cos q + B sin q = C
    const double a = 2.0 * params.l_U * d.dot(u);
    const double b = 2.0 * params.l_U * d.z();
    const double c = d.squaredNorm() + params.l_U * params.l_U - params.l_L * params.l_L;
    const double r = std::hypot(a, b);
    if (!(r > 0.0) || std::abs(c) > r) {
      throw PlanError(ErrorCode::Unreachable, "arm " + std::to_string(i) + " cannot reach the point");
    }
    const double base = std::atan2(b, a);
    const double spread = std::acos(std::clamp(c / r, -1.0, 1.0));
    // Elbow-out root: the one with the larger radial reach (larger cos q).
    const double q_a = std::remainder(base - spread, 2.0 * M_PI);
    const double q_b = std::remainder(base + spread, 2.0 * M_PI);
    q(i - 1) = std::cos(q_a) >= std::cos(q_b) ? q_a : q_b;
  }
  return q;
}

double kinematic_residual(const DeltaParams& params, const JointAngles& q, const Vec3& p_E_D) {
  const Vec3 wrist = p_E_D + Vec3(0.0, 0.0, params.l_g);
  double worst = 0.0;
  for (int i = 1; i <= 3; ++i) {
    worst = std::max(worst, std::abs((wrist - elbow_point(params, q(i - 1), i)).norm() - params.l_L));
  }
  return worst;
}

Vec3 ee_in_body(const MountTransform& mount, const Vec3& p_E_D) { return mount.R_D_B * p_E_D + mount.p_C_B; }

namespace {

struct HullFace {
  std::array<int, 3> v;
  Vec3 n;
  double d;
  bool alive = true;
};

HullFace make_face(const std::vector<Vec3>& pts, int a, int b, int c) {
  HullFace f;
  f.v = {a, b, c};
  Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  f.n = n.normalized();
  f.d = f.n.dot(pts[a]);
  return f;
}

}  // namespace

HalfspacePolytope convex_hull_halfspaces(const std::vector<Vec3>& points, std::uint64_t seed) {
  if (points.size() < 4) throw PlanError(ErrorCode::DegenerateHull, "fewer than four points");
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, (p - points[0]).norm());
  const double eps = 1e-10 * std::max(scale, 1e-12);

  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Initial tetrahedron from extreme points.
  const int i0 = order[0];
  int i1 = -1;
  double best = 0.0;
  for (int k : order) {
    const double v = (points[k] - points[i0]).norm();
    if (v > best) { best = v; i1 = k; }
  }
  if (i1 < 0 || best <= eps) throw PlanError(ErrorCode::DegenerateHull, "all points coincide");
  int i2 = -1;
  best = 0.0;
  const Vec3 dir = (points[i1] - points[i0]).normalized();
  for (int k : order) {
    const double v = (points[k] - points[i0]).cross(dir).norm();
    if (v > best) { best = v; i2 = k; }
  }
  if (i2 < 0 || best <= eps) throw PlanError(ErrorCode::DegenerateHull, "all points collinear");
  const Vec3 pn = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = -1;
  best = 0.0;
  for (int k : order) {
    const double v = std::abs(pn.dot(points[k] - points[i0]));
    if (v > best) { best = v; i3 = k; }
  }
  if (i3 < 0 || best <= eps) throw PlanError(ErrorCode::DegenerateHull, "all points coplanar");

  const Vec3 inner = 0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);
  std::vector<HullFace> faces;
  auto add_oriented = [&](int a, int b, int c) {
    HullFace f = make_face(points, a, b, c);
    if (f.n.dot(inner) - f.d > 0.0) f = make_face(points, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  std::vector<int> visible;
  std::set<std::pair<int, int>> edges;
  for (int k : order) {
    if (k == i0 || k == i1 || k == i2 || k == i3) continue;
    const Vec3& p = points[k];
    visible.clear();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive && faces[f].n.dot(p) - faces[f].d > eps) visible.push_back(static_cast<int>(f));
    }
    if (visible.empty()) continue;
    edges.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edges.insert({v[e], v[(e + 1) % 3]});
      faces[f].alive = false;
    }
    for (const auto& [u, w] : edges) {
      if (edges.count({w, u})) continue;
      faces.push_back(make_face(points, u, w, k));
    }
  }

  std::vector<std::pair<Vec3, double>> planes;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    bool dup = false;
    for (const auto& [n, d] : planes) {
      if ((n - f.n).norm() < 1e-9 && std::abs(d - f.d) < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) planes.emplace_back(f.n, f.d);
  }
  Eigen::MatrixX3d a(planes.size(), 3);
  Eigen::VectorXd b(planes.size());
  for (std::size_t r = 0; r < planes.size(); ++r) {
    a.row(r) = planes[r].first.transpose();
    b(r) = planes[r].second;
  }
  return HalfspacePolytope(a, b);
}

std::vector<Vec3> workspace_samples(const DeltaParams& params, const JointLimits& limits, int n_samples) {
  if (n_samples < 1000) throw PlanError(ErrorCode::DimensionMismatch, "workspace needs at least 1000 samples");
  const int per_axis = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_samples)) - 1e-9));
  std::vector<Vec3> samples;
  samples.reserve(static_cast<std::size_t>(per_axis) * per_axis * per_axis);
  auto value = [&](int k) { return limits.q_lo + (limits.q_hi - limits.q_lo) * k / (per_axis - 1); };
  for (int a = 0; a < per_axis; ++a)
    for (int b = 0; b < per_axis; ++b)
      for (int c = 0; c < per_axis; ++c) {
        try {
          samples.push_back(forward_kinematics(params, JointAngles(value(a), value(b), value(c))));
        } catch (const PlanError&) {
          // unreachable joint combination: not part of the workspace
        }
      }
  return samples;
}

HalfspacePolytope approximate_workspace(const DeltaParams& params, const JointLimits& limits, int n_samples,
                                        std::uint64_t seed, double shrink) {
  params.validate();
  return convex_hull_halfspaces(workspace_samples(params, limits, n_samples), seed).shrunk(shrink);
}

}  // namespace pickplan
