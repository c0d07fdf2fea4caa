#pragma once

#include <vector>

#include "pickplan/feasibility.hpp"
#include "pickplan/grid_map.hpp"
#include "pickplan/grid_planner.hpp"

namespace pickplan {

struct QuadLimits {
  double v_max = 0.5;
  double a_max = 1.0;

  void validate() const;
};

struct Corridor {
  std::vector<HalfspacePolytope> cells;
  std::vector<Aabb> bounds;      // axis-aligned bounds of each cell
  std::vector<Vec3> overlaps;    // one witness per adjacent pair, inside both cells
  std::vector<double> durations;  // s, > 0

  std::size_t size() const { return cells.size(); }
  double total_duration() const;
  // Throws CorridorGap on a bad witness, DimensionMismatch on bad sizes or durations.
  void validate() const;
};

struct TimeAllocation {
  double velocity_fraction = 0.6;  // of v_max
  double accel_fraction = 0.5;     // of a_max
  double min_duration = 0.3;       // s per cell
};

// Rest-to-rest time over a straight run under a trapezoidal (or triangular) speed profile.
double trapezoid_time(double length, double v, double a);
// Time at which arc length s is reached on that profile.
double trapezoid_time_at(double s, double length, double v, double a);

// Boxes grown face by face (+x, -x, +y, -y, +z, -z, one layer per turn) over
// free cells of the already inflated grid. Each box after the first is seeded
// with the last path cell inside its predecessor and the first one outside.
Corridor generate_corridor(const GridMap3D& free_space, const GridPath& path, const Vec3& start, const Vec3& goal,
                           const QuadLimits& limits, const TimeAllocation& alloc = {});

// Base positions from which p_O lies in the revised workspace:
// |R_psi^T (p - p_B_f)| <= (w_max - w_min) / 2 per axis.
HalfspacePolytope designed_polyhedron(const Vec3& p_B_f, double psi_O, const RevisedWorkspace& w_r);

// Throws CorridorGap when a free-space cell overlapping the polytope bounds is occupied.
void require_free(const GridMap3D& free_space, const HalfspacePolytope& poly, const Aabb& poly_bounds);

Aabb polytope_bounds(const HalfspacePolytope& poly);

// Attach a cell at either end; throws CorridorGap when it misses its neighbor.
void append_cell(Corridor& corridor, const HalfspacePolytope& cell, double duration);
void prepend_cell(Corridor& corridor, const HalfspacePolytope& cell, double duration);

}  // namespace pickplan
