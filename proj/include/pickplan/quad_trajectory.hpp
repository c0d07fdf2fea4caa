#pragma once

#include <limits>
#include <vector>

#include "pickplan/bezier.hpp"
#include "pickplan/corridor.hpp"

namespace pickplan {

inline constexpr double kGravity = 9.81;

// Per-axis bounds on derivative control points of one corridor cell.
struct DerivativeBounds {
  double v = std::numeric_limits<double>::infinity();
  double a = std::numeric_limits<double>::infinity();
  double j = std::numeric_limits<double>::infinity();
  double s = std::numeric_limits<double>::infinity();
};

struct QuadLeg {
  Corridor corridor;
  std::vector<DerivativeBounds> bounds;  // one per cell
  std::vector<bool> fixed_duration;      // cells exempt from retry scaling
  Vec3 p_start = Vec3::Zero();
  Vec3 p_goal = Vec3::Zero();
  double t0 = 0.0;
};

struct QuadSolveInfo {
  int retries = 0;
  int qp_iterations = 0;
  double kkt_max = 0.0;
  int variables = 0;
  bool axis_separable = false;
  std::vector<double> durations;
};

struct QuadOptions {
  int degree = 7;
  int max_retries = 3;
  double retry_scale = 1.5;
};

// Rest-to-rest, C2 at joints, minimum squared jerk. Every position control
// point lies in its cell. Throws QpInfeasible after max_retries rescalings.
PiecewiseBezier generate_quad_trajectory(const QuadLeg& leg, const QuadOptions& options = {},
                                         QuadSolveInfo* info = nullptr);

// Uniform v_max / a_max bounds over every cell, starting at t = 0.
PiecewiseBezier generate_quad_trajectory(const Corridor& corridor, const Vec3& p_start, const Vec3& p_goal,
                                         const QuadLimits& limits, const QuadOptions& options = {});

PiecewiseBezier hold_segment(const Vec3& p, double t0, double duration, int degree = 7);

// Bounds for the cells where the arm enters or leaves the manipulation pose.
// They keep the tilt-induced end-effector offset of the extended arm within
// half the workspace width and its rates within the end-effector limits, so
// the arm's initial state is admissible.
DerivativeBounds manipulation_bounds(const Vec3& p_top, double half_width, double v_E_max, double a_E_max,
                                     const QuadLimits& quad);

}  // namespace pickplan
