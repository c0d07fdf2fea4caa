#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pickplan {

using Vec3 = Eigen::Vector3d;
using RotMat3 = Eigen::Matrix3d;

RotMat3 yaw_rotation(double psi);
RotMat3 rot_x(double angle);
RotMat3 rot_y(double angle);
bool is_rotation(const RotMat3& r, double tol = 1e-9);

struct Aabb {
  Vec3 l_min = Vec3::Zero();
  Vec3 l_max = Vec3::Zero();

  Aabb() = default;
  Aabb(const Vec3& lo, const Vec3& hi);

  bool contains(const Vec3& p, double tol = 0.0) const;
  bool intersects(const Aabb& other) const;
  Vec3 center() const { return 0.5 * (l_min + l_max); }
  Vec3 extent() const { return l_max - l_min; }
};

// Convex set given by the hull of a finite vertex list.
struct ConvexPolyhedronV {
  std::vector<Vec3> vertices;

  ConvexPolyhedronV() = default;
  explicit ConvexPolyhedronV(std::vector<Vec3> v);

  // Vertex maximizing d . v; ties resolve to the lowest index.
  const Vec3& support(const Vec3& d) const;
  Vec3 centroid() const;
  Aabb bounds() const;
};

ConvexPolyhedronV aabb_vertices(const Aabb& box);

// {p | A p <= b}. Rows are unit-normalized on construction so that offsets and
// tolerances are in meters.
class HalfspacePolytope {
 public:
  HalfspacePolytope() = default;
  HalfspacePolytope(const Eigen::MatrixX3d& a, const Eigen::VectorXd& b);

  static HalfspacePolytope from_aabb(const Aabb& box);

  const Eigen::MatrixX3d& A() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  int rows() const { return static_cast<int>(b_.size()); }

  // max_i (A_i p - b_i); nonpositive inside.
  double max_violation(const Vec3& p) const;

  HalfspacePolytope intersect(const HalfspacePolytope& other) const;
  // Moves every face inward by margin.
  HalfspacePolytope shrunk(double margin) const;
  HalfspacePolytope translated(const Vec3& t) const;

  // True when every row normal is a signed coordinate axis.
  bool axis_aligned(double tol = 1e-12) const;

 private:
  Eigen::MatrixX3d a_;
  Eigen::VectorXd b_;
};

bool polytope_contains(const HalfspacePolytope& poly, const Vec3& p, double tol = 0.0);

}  // namespace pickplan
