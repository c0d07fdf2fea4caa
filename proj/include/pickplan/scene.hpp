#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pickplan/collision.hpp"
#include "pickplan/corridor.hpp"
#include "pickplan/delta_arm.hpp"
#include "pickplan/ee_trajectory.hpp"
#include "pickplan/feasibility.hpp"
#include "pickplan/grid_map.hpp"

namespace pickplan {

// One pick or place: the end-effector reaches p_O and holds for t_grip.
struct GraspTask {
  Vec3 p_O = Vec3::Zero();
  double psi_O = 0.0;
  double t_grip = 2.0;
};

// Used when the scene gives tilt bounds instead of an explicit revised workspace.
struct WorkspaceDerivation {
  DeltaParams delta;
  JointLimits joints;
  TiltBounds tilts;
  int samples = 4096;
};

struct PlannerParams {
  double inflate_radius = 0.5;  // quad approximated as a sphere of radius r_S
  double r_S = 0.5;
  double l_C = 0.06;
  double l_s = 0.2;
  double alpha = 3.0;
  int degree = 7;
  int max_iterations = 50;
  double cone_angle = 0.2617993877991494;
  double cone_time_fraction = 0.8;
  double retract_cone_time_fraction = 0.2;
  double delta_I = 1e-3;
  // Retracted end-effector sits this far below the W_R center, clamped to W_R.
  double approach_offset = 0.04;
  double sweep_dt = 5e-3;
  double verify_sweep_dt = 5e-4;
  double verify_dt = 1e-3;
  double feasibility_slack = 0.005;
  double sample_dt = 0.01;
  TimeAllocation allocation;
};

struct Scene {
  std::string name;
  GridMap3D grid;
  std::vector<ArmObstacle> arm_obstacles;
  Vec3 p_start = Vec3::Zero();
  Vec3 p_end = Vec3::Zero();
  std::vector<GraspTask> tasks;
  QuadLimits quad_limits;
  EeLimits ee_limits;
  MountTransform mount;
  RevisedWorkspace w_r;
  std::optional<WorkspaceDerivation> derive_workspace;
  PlannerParams params;
  std::uint64_t seed = 0;

  // Throws SceneError on any inconsistent field.
  void validate() const;
};

// JSON with unit-suffixed keys; see README for the schema. Throws SceneError.
Scene parse_scene(const std::string& json_text);
Scene load_scene(const std::string& path);

}  // namespace pickplan
