#include "pickplan/collision.hpp"

#include <algorithm>
#include <cmath>

#include "pickplan/error.hpp"
#include "pickplan/gjk.hpp"

namespace pickplan {

ConvexPolyhedronV ShapePolyhedron::hull() const {
  return ConvexPolyhedronV({upper[0], upper[1], upper[2], lower[0], lower[1], lower[2]});
}

ShapePolyhedron shape_polyhedron(const Vec3& p_B, const Vec3& p_E, double psi, const MountTransform& mount,
                                 double r_S, double l_C) {
  const RotMat3 r = yaw_rotation(psi) * mount.R_D_B;
  ShapePolyhedron s;
  for (int i = 1; i <= 3; ++i) {
    const double up = (1.0 + 2.0 * i) * M_PI / 3.0;
    const double lo = (1.0 + 2.0 * i) * M_PI / 6.0;
    s.upper[i - 1] = p_B + r * Vec3(r_S * std::cos(up), r_S * std::sin(up), 0.0);
    s.lower[i - 1] = p_E + r * Vec3(l_C * std::cos(lo), l_C * std::sin(lo), l_C);
  }
  return s;
}

Aabb local_map_box(const Vec3& p_B_tB, const Vec3& p_O, double l_s) {
  if (l_s < 0.0) throw PlanError(ErrorCode::DimensionMismatch, "local map margin must be nonnegative");
  return {p_B_tB.cwiseMin(p_O) - Vec3::Constant(l_s), p_B_tB.cwiseMax(p_O) + Vec3::Constant(l_s)};
}

std::vector<CollisionInterval> sweep_collisions(const BezierSegment& ee, const PiecewiseBezier& quad,
                                                const std::vector<ArmObstacle>& obstacles, const SweepConfig& cfg,
                                                SweepStats* stats) {
  if (!(cfg.dt > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "sweep dt must be positive");
  std::vector<const ArmObstacle*> local;
  for (const auto& o : obstacles)
    if (o.hull.bounds().intersects(cfg.box)) local.push_back(&o);
  std::vector<CollisionInterval> out;
  if (local.empty()) return out;

  const double t0 = ee.t0(), t1 = ee.t1();
  const int steps = static_cast<int>(std::ceil((t1 - t0) / cfg.dt - 1e-9));
  std::vector<ConvexPolyhedronV> shapes;
  std::vector<double> times;
  std::vector<Vec3> refs;
  shapes.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(t1, t0 + k * cfg.dt);
    const Vec3 p_E = ee.position(t);
    shapes.push_back(shape_polyhedron(quad.position(t), p_E, cfg.psi, cfg.mount, cfg.r_S, cfg.l_C).hull());
    times.push_back(t);
    refs.push_back(p_E);
  }
  for (const ArmObstacle* o : local) {
    if (stats) stats->queried_ids.push_back(o->id);
    int first = -1, last = -1;
    for (int k = 0; k <= steps; ++k) {
      if (stats) ++stats->gjk_queries;
      if (gjk_query(shapes[k], o->hull).intersects) {
        if (first < 0) first = k;
        last = k;
      }
    }
    if (first >= 0) out.push_back({o->id, refs[first], refs[last], times[first], times[last]});
  }
  return out;
}

Vec3 pinhole_mirror(const Vec3& T_L, const Vec3& T_R, const Vec3& centroid) {
  const Vec3 p_P = 0.5 * (T_L + T_R);
  return 2.0 * p_P - centroid;
}

ObstacleMirrorSet update_weights(const ObstacleMirrorSet& mirrors, const std::vector<CollisionInterval>& intervals,
                                 const std::vector<ArmObstacle>& obstacles, double alpha) {
  if (!(alpha > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "alpha must be positive");
  ObstacleMirrorSet out = mirrors;
  for (const auto& iv : intervals) {
    const auto obs = std::find_if(obstacles.begin(), obstacles.end(),
                                  [&](const ArmObstacle& o) { return o.id == iv.obstacle_id; });
    if (obs == obstacles.end()) throw PlanError(ErrorCode::DimensionMismatch, "interval names an unknown obstacle");
    const Vec3 p_M = pinhole_mirror(iv.T_L, iv.T_R, obs->hull.centroid());
    auto entry = std::find_if(out.begin(), out.end(), [&](const MirrorEntry& m) { return m.obstacle_id == iv.obstacle_id; });
    if (entry == out.end()) {
      out.push_back({iv.obstacle_id, p_M, alpha * iv.length()});
    } else {
      entry->lambda += alpha * iv.length();
      entry->p_M = p_M;
    }
  }
  return out;
}

}  // namespace pickplan
