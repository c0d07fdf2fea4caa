#include "pickplan/corridor.hpp"

#include <algorithm>
#include <cmath>

#include "pickplan/error.hpp"
#include "pickplan/lp.hpp"

namespace pickplan {

namespace {

struct CellBox {
  CellIndex lo;
  CellIndex hi;

  bool contains(const CellIndex& c) const {
    for (int k = 0; k < 3; ++k)
      if (c[k] < lo[k] || c[k] > hi[k]) return false;
    return true;
  }
};

bool slab_free(const GridMap3D& g, CellBox box, int axis, int layer) {
  box.lo[axis] = box.hi[axis] = layer;
  if (layer < 0 || layer >= g.dims()[axis]) return false;
  for (int z = box.lo[2]; z <= box.hi[2]; ++z)
    for (int y = box.lo[1]; y <= box.hi[1]; ++y)
      for (int x = box.lo[0]; x <= box.hi[0]; ++x)
        if (g.occupied({x, y, z})) return false;
  return true;
}

CellBox grow(const GridMap3D& g, CellBox box) {
  bool blocked[6] = {false, false, false, false, false, false};
  bool any = true;
  while (any) {
    any = false;
    for (int face = 0; face < 6; ++face) {
      if (blocked[face]) continue;
      const int axis = face / 2;
      const bool up = face % 2 == 0;
      const int layer = up ? box.hi[axis] + 1 : box.lo[axis] - 1;
      if (slab_free(g, box, axis, layer)) {
        (up ? box.hi[axis] : box.lo[axis]) = layer;
        any = true;
      } else {
        blocked[face] = true;
      }
    }
  }
  return box;
}

Aabb world_box(const GridMap3D& g, const CellBox& b) {
  const double h = g.cell_size();
  return {g.origin() + h * Vec3(b.lo[0], b.lo[1], b.lo[2]), g.origin() + h * Vec3(b.hi[0] + 1, b.hi[1] + 1, b.hi[2] + 1)};
}

Vec3 overlap_witness(const HalfspacePolytope& a, const HalfspacePolytope& b) {
  const ChebyshevBall ball = chebyshev_center(a.intersect(b));
  if (ball.radius <= 1e-9 || !polytope_contains(a, ball.center, 1e-9) || !polytope_contains(b, ball.center, 1e-9)) {
    throw PlanError(ErrorCode::CorridorGap, "adjacent corridor cells do not overlap", Stage::Corridor);
  }
  return ball.center;
}

}  // namespace

void QuadLimits::validate() const {
  if (!(v_max > 0.0) || !(a_max > 0.0)) throw PlanError(ErrorCode::SceneError, "quad limits must be positive");
}

double Corridor::total_duration() const {
  double t = 0.0;
  for (double d : durations) t += d;
  return t;
}

void Corridor::validate() const {
  if (cells.empty() || bounds.size() != cells.size() || durations.size() != cells.size() ||
      overlaps.size() + 1 != cells.size()) {
    throw PlanError(ErrorCode::DimensionMismatch, "corridor arrays have inconsistent sizes", Stage::Corridor);
  }
  for (double d : durations)
    if (!(d > 0.0)) throw PlanError(ErrorCode::DimensionMismatch, "corridor durations must be positive");
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    if (!polytope_contains(cells[k], overlaps[k], 1e-9) || !polytope_contains(cells[k + 1], overlaps[k], 1e-9)) {
      throw PlanError(ErrorCode::CorridorGap, "overlap witness misses a cell", Stage::Corridor);
    }
  }
}

double trapezoid_time(double length, double v, double a) {
  if (length <= 0.0) return 0.0;
  const double ramp = v * v / a;  // distance spent accelerating plus braking
  if (length <= ramp) return 2.0 * std::sqrt(length / a);
  return length / v + v / a;
}

double trapezoid_time_at(double s, double length, double v, double a) {
  s = std::clamp(s, 0.0, length);
  const double total = trapezoid_time(length, v, a);
  const double v_peak = std::min(v, std::sqrt(a * length));
  const double d_ramp = 0.5 * v_peak * v_peak / a;
  if (s <= d_ramp) return std::sqrt(2.0 * s / a);
  if (s <= length - d_ramp) return v_peak / a + (s - d_ramp) / v_peak;
  return total - std::sqrt(2.0 * (length - s) / a);
}

Corridor generate_corridor(const GridMap3D& free_space, const GridPath& path, const Vec3& start, const Vec3& goal,
                           const QuadLimits& limits, const TimeAllocation& alloc) {
  limits.validate();
  const auto& cells = path.cells;
  if (cells.empty()) throw PlanError(ErrorCode::NoPath, "empty path", Stage::Corridor);
  for (const auto& c : cells) {
    if (!free_space.in_bounds(c) || free_space.occupied(c)) {
      throw PlanError(ErrorCode::CorridorGap, "path cell is occupied after inflation", Stage::Corridor);
    }
  }

  // Polyline through the exact endpoints and the interior cell centers.
  const std::size_t n = cells.size();
  std::vector<Vec3> pts(n);
  for (std::size_t k = 0; k < n; ++k) pts[k] = free_space.cell_center(cells[k]);
  pts.front() = start;
  if (n > 1) pts.back() = goal;
  std::vector<double> arc(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();
  double length = arc.back();
  if (n == 1) length = (goal - start).norm();

  Corridor cor;
  std::vector<double> handoff;
  std::size_t i = 0;
  CellBox seed{cells[0], cells[0]};
  while (true) {
    const CellBox box = grow(free_space, seed);
    const Aabb wb = world_box(free_space, box);
    cor.cells.push_back(HalfspacePolytope::from_aabb(wb));
    cor.bounds.push_back(wb);
    std::size_t j = i;
    while (j < n && box.contains(cells[j])) ++j;
    if (j == n) break;
    for (int k = 0; k < 3; ++k) {
      seed.lo[k] = std::min(cells[j - 1][k], cells[j][k]);
      seed.hi[k] = std::max(cells[j - 1][k], cells[j][k]);
    }
    handoff.push_back(0.5 * (arc[j - 1] + arc[j]));
    i = j;
  }
  if (!cor.bounds.back().contains(goal, 1e-12) || !cor.bounds.front().contains(start, 1e-12)) {
    throw PlanError(ErrorCode::CorridorGap, "corridor misses an endpoint", Stage::Corridor);
  }
  for (std::size_t k = 0; k + 1 < cor.cells.size(); ++k)
    cor.overlaps.push_back(overlap_witness(cor.cells[k], cor.cells[k + 1]));

  const double v = alloc.velocity_fraction * limits.v_max;
  const double a = alloc.accel_fraction * limits.a_max;
  double prev = 0.0;
  handoff.push_back(length);
  for (double s : handoff) {
    const double t = trapezoid_time_at(s, length, v, a);
    cor.durations.push_back(std::max(alloc.min_duration, t - prev));
    prev = t;
  }
  return cor;
}

HalfspacePolytope designed_polyhedron(const Vec3& p_B_f, double psi_O, const RevisedWorkspace& w_r) {
  const RotMat3 rt = yaw_rotation(psi_O).transpose();
  const Vec3 h = w_r.half_extent();
  Eigen::MatrixX3d a(6, 3);
  Eigen::VectorXd b(6);
  for (int k = 0; k < 3; ++k) {
    a.row(2 * k) = rt.row(k);
    b[2 * k] = h[k] + rt.row(k).dot(p_B_f);
    a.row(2 * k + 1) = -rt.row(k);
    b[2 * k + 1] = h[k] - rt.row(k).dot(p_B_f);
  }
  return {a, b};
}

Aabb polytope_bounds(const HalfspacePolytope& poly) {
  Aabb box;
  for (int k = 0; k < 3; ++k) {
    for (int sign : {1, -1}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
      c[k] = sign;
      const LpResult r = solve_lp(c, poly.A(), poly.b());
      if (r.status != LpStatus::Optimal) {
        throw PlanError(ErrorCode::DegenerateHull, "polytope is empty or unbounded", Stage::Corridor);
      }
      (sign > 0 ? box.l_max : box.l_min)(k) = r.x[k];
    }
  }
  return box;
}

void require_free(const GridMap3D& free_space, const HalfspacePolytope& poly, const Aabb& poly_bounds) {
  const double h = free_space.cell_size();
  CellIndex lo, hi;
  for (int k = 0; k < 3; ++k) {
    lo[k] = static_cast<int>(std::floor((poly_bounds.l_min(k) - free_space.origin()(k)) / h));
    hi[k] = static_cast<int>(std::floor((poly_bounds.l_max(k) - free_space.origin()(k)) / h));
  }
  const double half_diag = 0.5 * std::sqrt(3.0) * h;
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const CellIndex c{x, y, z};
        if (poly.max_violation(free_space.cell_center(c)) > half_diag) continue;
        if (!free_space.in_bounds(c) || free_space.occupied(c)) {
          throw PlanError(ErrorCode::CorridorGap, "designed polyhedron overlaps inflated occupancy", Stage::Corridor);
        }
      }
}

void append_cell(Corridor& corridor, const HalfspacePolytope& cell, double duration) {
  if (!corridor.cells.empty()) corridor.overlaps.push_back(overlap_witness(corridor.cells.back(), cell));
  corridor.cells.push_back(cell);
  corridor.bounds.push_back(polytope_bounds(cell));
  corridor.durations.push_back(duration);
}

void prepend_cell(Corridor& corridor, const HalfspacePolytope& cell, double duration) {
  if (!corridor.cells.empty()) corridor.overlaps.insert(corridor.overlaps.begin(), overlap_witness(cell, corridor.cells.front()));
  corridor.cells.insert(corridor.cells.begin(), cell);
  corridor.bounds.insert(corridor.bounds.begin(), polytope_bounds(cell));
  corridor.durations.insert(corridor.durations.begin(), duration);
}

}  // namespace pickplan
