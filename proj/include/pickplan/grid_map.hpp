#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pickplan/geometry.hpp"

namespace pickplan {

using CellIndex = std::array<int, 3>;

// Dense occupancy grid. Cell (i,j,k) spans origin + [i,i+1) * cell_size along x
// and likewise for y and z; its center is origin + (i + 0.5) * cell_size.
class GridMap3D {
 public:
  GridMap3D() = default;
  GridMap3D(const Vec3& origin, double cell_size, const CellIndex& dims);

  const Vec3& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  const CellIndex& dims() const { return dims_; }
  std::size_t cell_count() const { return occupancy_.size(); }
  Aabb bounds() const;

  bool in_bounds(const CellIndex& c) const;
  std::size_t linear_index(const CellIndex& c) const;
  CellIndex cell_of_linear(std::size_t idx) const;
  Vec3 cell_center(const CellIndex& c) const;
  // Cell containing p (nearest cell center); nullopt outside the map.
  std::optional<CellIndex> cell_at(const Vec3& p) const;

  bool occupied(const CellIndex& c) const { return occupancy_[linear_index(c)] != 0; }
  void set_occupied(const CellIndex& c, bool value = true);
  // Marks every cell whose center lies inside the box.
  void fill_box(const Aabb& box);
  std::size_t occupied_count() const;

  // Cells whose center is within radius of an occupied cell center, or within
  // radius of the map boundary, become occupied.
  GridMap3D inflated(double radius) const;

 private:
  Vec3 origin_ = Vec3::Zero();
  double cell_size_ = 0.1;
  CellIndex dims_{0, 0, 0};
  std::vector<std::uint8_t> occupancy_;
};

}  // namespace pickplan
