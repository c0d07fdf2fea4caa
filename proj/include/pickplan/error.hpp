#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pickplan {

enum class ErrorCode {
  NoIntersection,
  Unreachable,
  DegenerateHull,
  EmptyIntersection,
  NoPath,
  StartOccupied,
  GoalOccupied,
  CorridorGap,
  OutOfDomain,
  SingularSystem,
  DimensionMismatch,
  QpInfeasible,
  NoConvergence,
  NegativeWindow,
  Singular,
  SceneError,
  VerificationFailed,
  IoError,
};

// Pipeline stage a failure is attributed to. None means the error was raised
// by a library call outside plan_mission.
enum class Stage {
  None,
  Scene,
  Workspace,
  GraspPosition,
  PathSearch,
  Corridor,
  QuadTrajectory,
  EeInitialState,
  EeTrajectory,
  Verification,
  Export,
};

std::string_view to_string(ErrorCode code);
std::string_view to_string(Stage stage);

class PlanError : public std::runtime_error {
 public:
  PlanError(ErrorCode code, const std::string& what, Stage stage = Stage::None);

  ErrorCode code() const { return code_; }
  Stage stage() const { return stage_; }
  const std::string& detail() const { return detail_; }

  PlanError with_stage(Stage stage) const;

 private:
  ErrorCode code_;
  Stage stage_;
  std::string detail_;
};

}  // namespace pickplan
