#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pickplan/bezier.hpp"
#include "pickplan/delta_arm.hpp"
#include "pickplan/geometry.hpp"

namespace pickplan {

struct ArmObstacle {
  int id = 0;
  ConvexPolyhedronV hull;
};

struct ShapePolyhedron {
  std::array<Vec3, 3> upper;
  std::array<Vec3, 3> lower;

  ConvexPolyhedronV hull() const;
};

// Upper triangle of circumradius r_S about the base, lower one offset by l_C
// from the end-effector; both rotated by R_psi * R_D_B.
ShapePolyhedron shape_polyhedron(const Vec3& p_B, const Vec3& p_E, double psi, const MountTransform& mount,
                                 double r_S, double l_C);

Aabb local_map_box(const Vec3& p_B_tB, const Vec3& p_O, double l_s);

struct CollisionInterval {
  int obstacle_id = 0;
  Vec3 T_L = Vec3::Zero();
  Vec3 T_R = Vec3::Zero();
  double t_L = 0.0;
  double t_R = 0.0;

  double length() const { return (T_L - T_R).norm(); }
};

struct SweepConfig {
  double psi = 0.0;
  MountTransform mount;
  double r_S = 0.5;
  double l_C = 0.06;
  Aabb box;
  double dt = 5e-3;
};

struct SweepStats {
  std::size_t gjk_queries = 0;
  std::vector<int> queried_ids;
};

// Samples [ee.t0, ee.t1] at dt (window end included). Obstacles whose bounds
// miss the box are never queried. One interval per colliding obstacle, in
// obstacle order.
std::vector<CollisionInterval> sweep_collisions(const BezierSegment& ee, const PiecewiseBezier& quad,
                                                const std::vector<ArmObstacle>& obstacles, const SweepConfig& cfg,
                                                SweepStats* stats = nullptr);

// Point reflection of the obstacle centroid through the interval midpoint.
Vec3 pinhole_mirror(const Vec3& T_L, const Vec3& T_R, const Vec3& centroid);

struct MirrorEntry {
  int obstacle_id = 0;
  Vec3 p_M = Vec3::Zero();
  double lambda = 0.0;
};

using ObstacleMirrorSet = std::vector<MirrorEntry>;

// lambda += alpha * |T_L - T_R| and p_M refreshed for every colliding
// obstacle; entries are never removed.
ObstacleMirrorSet update_weights(const ObstacleMirrorSet& mirrors, const std::vector<CollisionInterval>& intervals,
                                 const std::vector<ArmObstacle>& obstacles, double alpha);

}  // namespace pickplan
