#pragma once

#include <cstdint>
#include <vector>

#include "pickplan/geometry.hpp"

namespace pickplan {

// Delta arm geometry in meters. The arm frame has z pointing toward gravity,
// so the end-effector hangs at positive z.
struct DeltaParams {
  double l_U = 0.20;  // upper arm
  double l_L = 0.50;  // lower arm
  double r_F = 0.08;  // top base circumradius
  double r_M = 0.03;  // end-effector base circumradius
  double l_g = 0.05;  // gripper length

  void validate() const;
};

struct JointLimits {
  double q_lo = -0.3;
  double q_hi = 1.4;
};

struct MountTransform {
  RotMat3 R_D_B = rot_x(M_PI);
  Vec3 p_C_B = Vec3(0.0, 0.0, -0.06);

  void validate() const;
};

using JointAngles = Eigen::Vector3d;

inline constexpr double kWorkspaceShrink = 0.01;

// Arm i (1..3) lies in the vertical plane at angle 2(i-1)pi/3.
double arm_plane_angle(int i);
Vec3 elbow_point(const DeltaParams& params, double q_i, int i);

Vec3 forward_kinematics(const DeltaParams& params, const JointAngles& q);
JointAngles inverse_kinematics(const DeltaParams& params, const Vec3& p_E_D);

// max_i | ||p + l_G - h_i|| - l_L |, in meters.
double kinematic_residual(const DeltaParams& params, const JointAngles& q, const Vec3& p_E_D);

Vec3 ee_in_body(const MountTransform& mount, const Vec3& p_E_D);

// Facet halfspaces of the 3D convex hull. Insertion order is shuffled with the
// seed; near-duplicate facet planes are merged.
HalfspacePolytope convex_hull_halfspaces(const std::vector<Vec3>& points, std::uint64_t seed);

// FK samples over a uniform joint grid with ceil(cbrt(n_samples)) values per
// joint. The hull is shrunk by shrink so it is an inner approximation.
std::vector<Vec3> workspace_samples(const DeltaParams& params, const JointLimits& limits, int n_samples);
HalfspacePolytope approximate_workspace(const DeltaParams& params, const JointLimits& limits, int n_samples,
                                        std::uint64_t seed, double shrink = kWorkspaceShrink);

}  // namespace pickplan
