#include "pickplan/grid_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "pickplan/error.hpp"

namespace pickplan {

Vec3 feasible_grasp_position(const Vec3& p_O, double psi_O, const RevisedWorkspace& w_r) {
  return p_O - yaw_rotation(psi_O) * w_r.center();
}

Vec3 workspace_top_point(const RevisedWorkspace& w_r) {
  const Vec3 c = w_r.center();
  return {c.x(), c.y(), w_r.w_min.z()};
}

std::vector<std::pair<CellIndex, double>> grid_neighbors(const GridMap3D& free_space, const CellIndex& c) {
  std::vector<std::pair<CellIndex, double>> out;
  const double h = free_space.cell_size();
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int d[3] = {dx, dy, dz};
        bool ok = true;
        // Every sub-move over the nonzero axes, the full move included, must land on a free cell.
        for (int mask = 1; mask < 8 && ok; ++mask) {
          CellIndex n = c;
          bool valid = true;
          for (int k = 0; k < 3; ++k) {
            if (!((mask >> k) & 1)) continue;
            if (d[k] == 0) valid = false;
            n[k] += d[k];
          }
          if (valid && (!free_space.in_bounds(n) || free_space.occupied(n))) ok = false;
        }
        if (ok) out.push_back({{c[0] + dx, c[1] + dy, c[2] + dz}, h * std::sqrt(double(dx * dx + dy * dy + dz * dz))});
      }
  return out;
}

GridPath astar_cells(const GridMap3D& free_space, const CellIndex& start, const CellIndex& goal) {
  if (!free_space.in_bounds(start) || free_space.occupied(start)) {
    throw PlanError(ErrorCode::StartOccupied, "start cell is occupied after inflation", Stage::PathSearch);
  }
  if (!free_space.in_bounds(goal) || free_space.occupied(goal)) {
    throw PlanError(ErrorCode::GoalOccupied, "goal cell is occupied after inflation", Stage::PathSearch);
  }
  const std::size_t n = free_space.cell_count();
  const Vec3 goal_center = free_space.cell_center(goal);
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const std::size_t s = free_space.linear_index(start);
  const std::size_t t = free_space.linear_index(goal);
  g[s] = 0.0;
  const double h0 = (free_space.cell_center(start) - goal_center).norm();
  open.emplace(h0, h0, s);
  while (!open.empty()) {
    const auto [f, h, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == t) break;
    const CellIndex c = free_space.cell_of_linear(idx);
    for (const auto& [nb, step] : grid_neighbors(free_space, c)) {
      const std::size_t j = free_space.linear_index(nb);
      if (closed[j]) continue;
      const double cand = g[idx] + step;
      if (cand < g[j]) {
        g[j] = cand;
        parent[j] = idx;
        const double hj = (free_space.cell_center(nb) - goal_center).norm();
        open.emplace(cand + hj, hj, j);
      }
    }
  }
  if (!closed[t]) throw PlanError(ErrorCode::NoPath, "goal unreachable in the inflated grid", Stage::PathSearch);

  GridPath path;
  for (std::size_t idx = t; idx != n; idx = parent[idx]) path.cells.push_back(free_space.cell_of_linear(idx));
  std::reverse(path.cells.begin(), path.cells.end());
  for (const auto& c : path.cells) path.waypoints.push_back(free_space.cell_center(c));
  path.cost = g[t];
  return path;
}

GridPath astar(const GridMap3D& grid, const Vec3& start, const Vec3& goal, double inflate_radius) {
  const GridMap3D free_space = grid.inflated(inflate_radius);
  const auto s = free_space.cell_at(start);
  if (!s) throw PlanError(ErrorCode::StartOccupied, "start lies outside the map", Stage::PathSearch);
  const auto t = free_space.cell_at(goal);
  if (!t) throw PlanError(ErrorCode::GoalOccupied, "goal lies outside the map", Stage::PathSearch);
  return astar_cells(free_space, *s, *t);
}

}  // namespace pickplan
