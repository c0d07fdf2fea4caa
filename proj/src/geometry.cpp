#include "pickplan/geometry.hpp"

#include <cmath>
#include <limits>

#include "pickplan/error.hpp"

namespace pickplan {

namespace {

constexpr double kMinRowNorm = 1e-14;

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::StartOccupied: return "StartOccupied";
    case ErrorCode::GoalOccupied: return "GoalOccupied";
    case ErrorCode::CorridorGap: return "CorridorGap";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::QpInfeasible: return "QpInfeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NegativeWindow: return "NegativeWindow";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::SceneError: return "SceneError";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::None: return "none";
    case Stage::Scene: return "scene";
    case Stage::Workspace: return "workspace";
    case Stage::GraspPosition: return "grasp_position";
    case Stage::PathSearch: return "path_search";
    case Stage::Corridor: return "corridor";
    case Stage::QuadTrajectory: return "quad_trajectory";
    case Stage::EeInitialState: return "ee_initial_state";
    case Stage::EeTrajectory: return "ee_trajectory";
    case Stage::Verification: return "verification";
    case Stage::Export: return "export";
  }
  return "unknown";
}

PlanError::PlanError(ErrorCode code, const std::string& what, Stage stage)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      stage_(stage),
      detail_(what) {}

PlanError PlanError::with_stage(Stage stage) const { return PlanError(code_, detail_, stage); }

RotMat3 yaw_rotation(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  RotMat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

RotMat3 rot_x(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotMat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

RotMat3 rot_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotMat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

bool is_rotation(const RotMat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r * r.transpose() - RotMat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Aabb::Aabb(const Vec3& lo, const Vec3& hi) : l_min(lo), l_max(hi) {
  if ((lo.array() > hi.array()).any()) {
    throw PlanError(ErrorCode::DimensionMismatch, "Aabb requires l_min <= l_max");
  }
}

bool Aabb::contains(const Vec3& p, double tol) const {
  return (p.array() >= l_min.array() - tol).all() && (p.array() <= l_max.array() + tol).all();
}

bool Aabb::intersects(const Aabb& other) const {
  return (l_min.array() <= other.l_max.array()).all() && (other.l_min.array() <= l_max.array()).all();
}

ConvexPolyhedronV::ConvexPolyhedronV(std::vector<Vec3> v) : vertices(std::move(v)) {
  if (vertices.empty()) {
    throw PlanError(ErrorCode::DimensionMismatch, "ConvexPolyhedronV needs at least one vertex");
  }
}

const Vec3& ConvexPolyhedronV::support(const Vec3& d) const {
  std::size_t best = 0;
  double best_dot = vertices[0].dot(d);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double v = vertices[i].dot(d);
    if (v > best_dot) {
      best_dot = v;
      best = i;
    }
  }
  return vertices[best];
}

Vec3 ConvexPolyhedronV::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& v : vertices) c += v;
  return c / static_cast<double>(vertices.size());
}

Aabb ConvexPolyhedronV::bounds() const {
  Vec3 lo = vertices[0];
  Vec3 hi = vertices[0];
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

ConvexPolyhedronV aabb_vertices(const Aabb& box) {
  std::vector<Vec3> v;
  v.reserve(8);
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? box.l_max.x() : box.l_min.x(),
                   (i & 2) ? box.l_max.y() : box.l_min.y(),
                   (i & 4) ? box.l_max.z() : box.l_min.z());
  }
  return ConvexPolyhedronV(std::move(v));
}

HalfspacePolytope::HalfspacePolytope(const Eigen::MatrixX3d& a, const Eigen::VectorXd& b) : a_(a), b_(b) {
  if (a.rows() != b.size()) {
    throw PlanError(ErrorCode::DimensionMismatch, "HalfspacePolytope: A and b row counts differ");
  }
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    const double n = a_.row(i).norm();
    if (!(n > kMinRowNorm) || !std::isfinite(b_(i))) {
      throw PlanError(ErrorCode::DimensionMismatch, "HalfspacePolytope: zero or non-finite row");
    }
    a_.row(i) /= n;
    b_(i) /= n;
  }
}

HalfspacePolytope HalfspacePolytope::from_aabb(const Aabb& box) {
  Eigen::MatrixX3d a(6, 3);
  Eigen::VectorXd b(6);
  a.setZero();
  for (int k = 0; k < 3; ++k) {
    a(2 * k, k) = 1.0;
    b(2 * k) = box.l_max(k);
    a(2 * k + 1, k) = -1.0;
    b(2 * k + 1) = -box.l_min(k);
  }
  return HalfspacePolytope(a, b);
}

double HalfspacePolytope::max_violation(const Vec3& p) const {
  if (b_.size() == 0) return -std::numeric_limits<double>::infinity();
  return (a_ * p - b_).maxCoeff();
}

HalfspacePolytope HalfspacePolytope::intersect(const HalfspacePolytope& other) const {
  Eigen::MatrixX3d a(rows() + other.rows(), 3);
  Eigen::VectorXd b(rows() + other.rows());
  a << a_, other.a_;
  b << b_, other.b_;
  return HalfspacePolytope(a, b);
}

HalfspacePolytope HalfspacePolytope::shrunk(double margin) const {
  HalfspacePolytope out = *this;
  out.b_.array() -= margin;
  return out;
}

HalfspacePolytope HalfspacePolytope::translated(const Vec3& t) const {
  HalfspacePolytope out = *this;
  out.b_ += a_ * t;
  return out;
}

bool HalfspacePolytope::axis_aligned(double tol) const {
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    int nonzero = 0;
    for (int k = 0; k < 3; ++k) {
      if (std::abs(a_(i, k)) > tol) ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return true;
}

bool polytope_contains(const HalfspacePolytope& poly, const Vec3& p, double tol) {
  return poly.max_violation(p) <= tol;
}

}  // namespace pickplan
