#include "pickplan/grid_map.hpp"

#include <cmath>

#include "pickplan/error.hpp"

namespace pickplan {

GridMap3D::GridMap3D(const Vec3& origin, double cell_size, const CellIndex& dims)
    : origin_(origin), cell_size_(cell_size), dims_(dims) {
  if (!(cell_size > 0.0) || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw PlanError(ErrorCode::DimensionMismatch, "grid needs cell_size > 0 and positive dims");
  }
  occupancy_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
}

Aabb GridMap3D::bounds() const {
  return {origin_, origin_ + cell_size_ * Vec3(dims_[0], dims_[1], dims_[2])};
}

bool GridMap3D::in_bounds(const CellIndex& c) const {
  for (int k = 0; k < 3; ++k) {
    if (c[k] < 0 || c[k] >= dims_[k]) return false;
  }
  return true;
}

std::size_t GridMap3D::linear_index(const CellIndex& c) const {
  return (static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
}

CellIndex GridMap3D::cell_of_linear(std::size_t idx) const {
  CellIndex c;
  c[0] = static_cast<int>(idx % dims_[0]);
  idx /= dims_[0];
  c[1] = static_cast<int>(idx % dims_[1]);
  c[2] = static_cast<int>(idx / dims_[1]);
  return c;
}

Vec3 GridMap3D::cell_center(const CellIndex& c) const {
  return origin_ + cell_size_ * Vec3(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

std::optional<CellIndex> GridMap3D::cell_at(const Vec3& p) const {
  CellIndex c;
  for (int k = 0; k < 3; ++k) {
    const double f = std::floor((p(k) - origin_(k)) / cell_size_);
    if (!(f >= 0.0) || f >= dims_[k]) return std::nullopt;
    c[k] = static_cast<int>(f);
  }
  return c;
}

void GridMap3D::set_occupied(const CellIndex& c, bool value) {
  occupancy_[linear_index(c)] = value ? 1 : 0;
}

void GridMap3D::fill_box(const Aabb& box) {
  CellIndex lo, hi;
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::ceil((box.l_min(k) - origin_(k)) / cell_size_ - 0.5)));
    hi[k] = std::min(dims_[k] - 1, static_cast<int>(std::floor((box.l_max(k) - origin_(k)) / cell_size_ - 0.5)));
  }
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) set_occupied({x, y, z});
}

std::size_t GridMap3D::occupied_count() const {
  std::size_t n = 0;
  for (auto o : occupancy_) n += o;
  return n;
}

GridMap3D GridMap3D::inflated(double radius) const {
  GridMap3D out = *this;
  const int r = static_cast<int>(std::floor(radius / cell_size_ + 1e-9));
  const double r2 = radius * radius + 1e-12;
  std::vector<CellIndex> stencil;
  for (int dz = -r; dz <= r; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const double d2 = cell_size_ * cell_size_ * (dx * dx + dy * dy + dz * dz);
        if (d2 <= r2) stencil.push_back({dx, dy, dz});
      }
  for (std::size_t idx = 0; idx < occupancy_.size(); ++idx) {
    if (!occupancy_[idx]) continue;
    const CellIndex c = cell_of_linear(idx);
    for (const auto& s : stencil) {
      const CellIndex n{c[0] + s[0], c[1] + s[1], c[2] + s[2]};
      if (in_bounds(n)) out.occupancy_[linear_index(n)] = 1;
    }
  }
  const Aabb b = bounds();
  for (std::size_t idx = 0; idx < occupancy_.size(); ++idx) {
    const Vec3 p = cell_center(cell_of_linear(idx));
    const double gap = std::min((p - b.l_min).minCoeff(), (b.l_max - p).minCoeff());
    if (gap < radius - 1e-12) out.occupancy_[idx] = 1;
  }
  return out;
}

}  // namespace pickplan
