#pragma once

#include <Eigen/Dense>

#include "pickplan/geometry.hpp"

namespace pickplan {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  int pivots = 0;
};

// max c.x subject to A x <= b with x free. Solved through the dual
// (min b.y, A^T y = c, y >= 0) by a two-phase tableau simplex under Bland's
// rule, so the tableau has one row per primal variable. Intended for few
// variables and many constraints. Unbounded and infeasible primals are only
// distinguished when the dual proves it; otherwise Unbounded is reported.
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct ChebyshevBall {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;  // negative when the polytope is empty
};

// Largest ball inside the polytope, radius capped at radius_cap.
ChebyshevBall chebyshev_center(const HalfspacePolytope& poly, double radius_cap = 1.0);

}  // namespace pickplan
