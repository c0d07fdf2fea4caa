#include "pickplan/feasibility.hpp"

#include <cmath>
#include <limits>

#include "pickplan/error.hpp"
#include "pickplan/lp.hpp"

namespace pickplan {

namespace {

constexpr double kCornerTol = 1e-9;
constexpr double kEmptyRadius = 1e-9;

}  // namespace

void TiltBounds::validate() const {
  const bool ordered = theta_min <= 0.0 && 0.0 <= theta_max && phi_min <= 0.0 && 0.0 <= phi_max;
  const double lim = 0.5 * M_PI;
  const bool small = std::abs(theta_min) < lim && std::abs(theta_max) < lim && std::abs(phi_min) < lim &&
                     std::abs(phi_max) < lim;
  if (!ordered || !small) throw PlanError(ErrorCode::SceneError, "tilt bounds must bracket zero within pi/2");
}

void RevisedWorkspace::validate() const {
  if (!w_min.allFinite() || !w_max.allFinite() || (w_min.array() > w_max.array()).any()) {
    throw PlanError(ErrorCode::SceneError, "revised workspace needs finite w_min <= w_max");
  }
}

RotMat3 tilt_rotation(double theta, double phi) { return rot_y(theta) * rot_x(phi); }

HalfspacePolytope tilted_workspace(const HalfspacePolytope& w, const MountTransform& mount, double theta, double phi) {
  const RotMat3 r = tilt_rotation(theta, phi) * mount.R_D_B;
  const Eigen::MatrixX3d a = w.A() * r.transpose();
  const Eigen::VectorXd b = w.b() + w.A() * (mount.R_D_B.transpose() * mount.p_C_B);
  return HalfspacePolytope(a, b);
}

HalfspacePolytope workspace_intersection(const HalfspacePolytope& w, const MountTransform& mount,
                                         const TiltBounds& tilts) {
  tilts.validate();
  const HalfspacePolytope w_i = tilted_workspace(w, mount, tilts.theta_min, 0.0)
                                    .intersect(tilted_workspace(w, mount, tilts.theta_max, 0.0))
                                    .intersect(tilted_workspace(w, mount, 0.0, tilts.phi_min))
                                    .intersect(tilted_workspace(w, mount, 0.0, tilts.phi_max));
  if (chebyshev_center(w_i).radius <= kEmptyRadius) {
    throw PlanError(ErrorCode::EmptyIntersection, "tilted workspaces have no common interior");
  }
  return w_i;
}

RevisedWorkspace inscribed_cuboid(const HalfspacePolytope& w_i) {
  const int m = w_i.rows();
  // x = (lo_x, lo_y, lo_z, hi_x, hi_y, hi_z, s)
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 6, 7);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 6);
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < 3; ++k) {
      const double coef = w_i.A()(r, k);
      a(r, coef > 0.0 ? 3 + k : k) = coef;
    }
    b(r) = w_i.b()(r);
  }
  for (int k = 0; k < 3; ++k) {
    a(m + k, k) = 1.0;
    a(m + k, 3 + k) = -1.0;
    a(m + 3 + k, 6) = 1.0;
    a(m + 3 + k, k) = 1.0;
    a(m + 3 + k, 3 + k) = -1.0;
  }
  Eigen::VectorXd c(7);
  c << -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0;
  const LpResult lp = solve_lp(c, a, b);
  if (lp.status != LpStatus::Optimal) {
    throw PlanError(ErrorCode::EmptyIntersection, "inscribed cuboid LP has no optimum");
  }
  RevisedWorkspace box;
  box.w_min = lp.x.head<3>();
  box.w_max = lp.x.segment<3>(3);
  box.w_max = box.w_max.cwiseMax(box.w_min);
  if (cuboid_violation(w_i, box) > kCornerTol) {
    throw PlanError(ErrorCode::EmptyIntersection, "inscribed cuboid corner outside the intersection");
  }
  return box;
}

double cuboid_violation(const HalfspacePolytope& poly, const RevisedWorkspace& box) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& v : aabb_vertices(Aabb(box.w_min, box.w_max)).vertices) {
    worst = std::max(worst, poly.max_violation(v));
  }
  return worst;
}

double geometric_feasibility_excess(const Vec3& p_E, const Vec3& p_B, double psi_O, const RevisedWorkspace& w_r) {
  const Vec3 d = yaw_rotation(psi_O).transpose() * (p_E - p_B);
  return std::max((w_r.w_min - d).maxCoeff(), (d - w_r.w_max).maxCoeff());
}

bool geometric_feasibility_ok(const Vec3& p_E, const Vec3& p_B, double psi_O, const RevisedWorkspace& w_r,
                              double tol) {
  return geometric_feasibility_excess(p_E, p_B, psi_O, w_r) <= tol;
}

}  // namespace pickplan
