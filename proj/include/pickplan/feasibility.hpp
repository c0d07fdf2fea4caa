#pragma once

#include "pickplan/delta_arm.hpp"
#include "pickplan/geometry.hpp"

namespace pickplan {

struct TiltBounds {
  double theta_min = -0.1745;
  double theta_max = 0.1745;
  double phi_min = -0.1745;
  double phi_max = 0.1745;

  void validate() const;
};

// Axis-aligned box [w_min, w_max] of admissible R_psi^T (p_E - p_B).
struct RevisedWorkspace {
  Vec3 w_min = Vec3(-0.06, -0.06, -0.60);
  Vec3 w_max = Vec3(0.06, 0.06, -0.40);

  void validate() const;
  Vec3 center() const { return 0.5 * (w_min + w_max); }
  Vec3 half_extent() const { return 0.5 * (w_max - w_min); }
};

// R_y(theta) * R_x(phi).
RotMat3 tilt_rotation(double theta, double phi);

HalfspacePolytope tilted_workspace(const HalfspacePolytope& w, const MountTransform& mount, double theta, double phi);

// Stack of the four boundary tilts. Throws EmptyIntersection when the
// Chebyshev radius is at most 1e-9.
HalfspacePolytope workspace_intersection(const HalfspacePolytope& w, const MountTransform& mount,
                                         const TiltBounds& tilts);

// LP over (w_min, w_max, s): maximize the edge sum plus s, with s bounded by
// every edge length. Each halfspace row only needs its single binding corner.
RevisedWorkspace inscribed_cuboid(const HalfspacePolytope& w_i);

// Largest positive value of A c - b over the 8 corners.
double cuboid_violation(const HalfspacePolytope& poly, const RevisedWorkspace& box);

// Worst signed excess of R_psi^T (p_E - p_B) outside [w_min, w_max].
double geometric_feasibility_excess(const Vec3& p_E, const Vec3& p_B, double psi_O, const RevisedWorkspace& w_r);
bool geometric_feasibility_ok(const Vec3& p_E, const Vec3& p_B, double psi_O, const RevisedWorkspace& w_r,
                              double tol = 1e-6);

}  // namespace pickplan
