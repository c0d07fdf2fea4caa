#pragma once

#include <utility>
#include <vector>

#include "pickplan/feasibility.hpp"
#include "pickplan/grid_map.hpp"

namespace pickplan {

struct GridPath {
  std::vector<CellIndex> cells;
  std::vector<Vec3> waypoints;  // cell centers
  double cost = 0.0;            // m, Euclidean between consecutive centers
};

// Base position that puts the workspace center on the object.
Vec3 feasible_grasp_position(const Vec3& p_O, double psi_O, const RevisedWorkspace& w_r);

// Arm-frame point [x center, y center, w_min.z].
Vec3 workspace_top_point(const RevisedWorkspace& w_r);

// 26-connected moves whose axis-aligned sub-moves all land on free cells.
// Cost is the Euclidean step length.
std::vector<std::pair<CellIndex, double>> grid_neighbors(const GridMap3D& free_space, const CellIndex& c);

// Search on an already inflated grid. Ties break on (f, h, linear index).
GridPath astar_cells(const GridMap3D& free_space, const CellIndex& start, const CellIndex& goal);

// Inflates occupancy by inflate_radius (map walls included) and searches.
// Throws StartOccupied, GoalOccupied, NoPath.
GridPath astar(const GridMap3D& grid, const Vec3& start, const Vec3& goal, double inflate_radius);

}  // namespace pickplan
