#pragma once

#include <vector>

#include "pickplan/bezier.hpp"
#include "pickplan/collision.hpp"
#include "pickplan/feasibility.hpp"
#include "pickplan/qp.hpp"
#include "pickplan/quad_trajectory.hpp"

namespace pickplan {

struct EeLimits {
  double v_max = 0.5;
  double a_max = 2.0;

  void validate() const;
  double window() const { return 2.0 * v_max / a_max; }
};

struct EeState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

// Throws NegativeWindow unless t_G > 2 v_max / a_max.
double manipulation_start_time(double t_G, const EeLimits& limits);

// Columns [r1, r2, r3]: r3 along accel + g e3, r2 = r3 x r_g normalized,
// r1 = r2 x r3. Throws Singular on free fall or r3 parallel to r_g.
RotMat3 flat_attitude(const Vec3& accel, double psi_O, double g = kGravity);

// p_B(t) + R_B(t) p_top, attitude from the flat map at t.
Vec3 retracted_ee_position(const PiecewiseBezier& quad, double t, const Vec3& p_top_B, double psi_O);

// Position at t, backward-difference velocity, central second difference.
EeState initial_state(const PiecewiseBezier& quad, double t_B, const Vec3& p_top_B, double psi_O, double delta_I);

struct ConeSpec {
  Vec3 apex = Vec3::Zero();
  double angle = 0.2617993877991494;  // 15 deg
  double tau = 0.8;
};

struct EeQpCounts {
  int equalities = 0;
  int velocity = 0;
  int acceleration = 0;
  int geometric = 0;
  int cone = 0;
  int inequalities() const { return velocity + acceleration + geometric + cone; }
};

// Documented inequality count: 6n + 6(n-1) + 6(n+1) + 4 = 18n + 4.
int ee_inequality_rows(int degree);

// Variables ordered x0..xn, y0..yn, z0..zn. Objective 0.5 c'Qc + q'c with
// Q = 2 (H + sum lambda I) and q = -2 sum lambda p_M, where H is the jerk
// Hessian scaled to unit mean diagonal so lambda is duration independent.
// Geometric rows: w_min <= R_psi^T (c_E,i - c_B,i) <= w_max.
QpProblem build_ee_qp(const EeState& start, const EeState& end, const std::vector<Vec3>& quad_fit_cps,
                      const RevisedWorkspace& w_r, double psi_O, const EeLimits& limits, const ConeSpec& cone,
                      const ObstacleMirrorSet& mirrors, double duration, EeQpCounts* counts = nullptr);

struct EeIteration {
  int iteration = 0;
  int qp_iterations = 0;
  double objective = 0.0;
  std::vector<CollisionInterval> intervals;
  ObstacleMirrorSet mirrors;  // weights used for this solve
};

struct EePlanConfig {
  double psi_O = 0.0;
  RevisedWorkspace w_r;
  EeLimits limits;
  ConeSpec cone;
  int degree = 7;
  double alpha = 3.0;
  int max_iterations = 50;
  bool avoidance = true;
  SweepConfig sweep;          // dt is the coarse sweep step
  double fine_dt = 5e-4;
  std::vector<ArmObstacle> obstacles;
};

struct EePlan {
  BezierSegment segment;
  std::vector<EeIteration> trace;
  std::vector<Vec3> quad_fit;
  bool converged = false;  // false only when avoidance is disabled and collisions remain
};

// Quad curve sampled at degree+1 uniform times over [t0, t1] and interpolated.
std::vector<Vec3> fit_quad_window(const PiecewiseBezier& quad, double t0, double t1, int degree);

// Iterative QP with collision sweeps over [t0, t1]. Throws QpInfeasible or NoConvergence.
EePlan plan_ee_trajectory(const PiecewiseBezier& quad, double t0, double t1, const EeState& start,
                          const EeState& end, const EePlanConfig& cfg);

}  // namespace pickplan
