#pragma once

#include <string>
#include <vector>

#include "pickplan/bezier.hpp"
#include "pickplan/corridor.hpp"
#include "pickplan/ee_trajectory.hpp"
#include "pickplan/grid_planner.hpp"
#include "pickplan/quad_trajectory.hpp"
#include "pickplan/scene.hpp"
#include "pickplan/verify.hpp"

namespace pickplan {

enum class PlanStage { Moving, Manipulation, All };

struct PlanOptions {
  bool ee_avoidance = true;
  // Moving plans the quadcopter only and leaves the arm retracted throughout.
  PlanStage stage = PlanStage::All;
};

// One rest-to-rest flight. Cell k spans [cell_start[k], cell_start[k+1]].
struct LegPlan {
  GridPath path;
  Corridor corridor;
  std::vector<double> cell_start;
  double t0 = 0.0;
  double t1 = 0.0;
  QuadSolveInfo info;
};

// Manipulation timeline of one task: approach [t_B, t_G], hold
// [t_G, t_release], retraction [t_release, t_back].
struct TaskPlan {
  GraspTask task;
  Vec3 p_B_f = Vec3::Zero();
  double t_B = 0.0;
  double t_G = 0.0;
  double t_release = 0.0;
  double t_back = 0.0;
  BezierSegment approach;
  BezierSegment retract;
  std::vector<EeIteration> approach_trace;
  std::vector<EeIteration> retract_trace;
  bool planned = false;  // false when only the moving stage was requested
};

struct StageTimings {
  double quad_ms = 0.0;
  double ee_ms = 0.0;
  double verify_ms = 0.0;
};

struct PlanResult {
  RevisedWorkspace w_r;
  Vec3 p_top_B = Vec3::Zero();
  PiecewiseBezier quad;
  std::vector<LegPlan> legs;
  std::vector<TaskPlan> tasks;
  VerificationReport verification;
  StageTimings timings;  // wall clock, excluded from deterministic outputs
};

// Revised workspace from the scene, derived from tilt bounds when requested.
RevisedWorkspace scene_workspace(const Scene& scene);

// Runs the whole pipeline and the verifier. Planning errors propagate with
// their stage; verification failures are recorded in result.verification.
PlanResult plan_mission(const Scene& scene, const PlanOptions& options = {});

enum class TrajectoryPhase { Retracted, Approach, Hold, Retract };
std::string_view to_string(TrajectoryPhase phase);

struct EeSample {
  CurveState state;
  TrajectoryPhase phase = TrajectoryPhase::Retracted;
};

// End-effector world state at t. Outside manipulation windows the arm is
// rigidly retracted at p_top_B and derivatives come from central differences.
EeSample ee_state_at(const PlanResult& result, double t, double fd_step = 1e-4);

}  // namespace pickplan
