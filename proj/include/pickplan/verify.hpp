#pragma once

#include <string>
#include <vector>

namespace pickplan {

struct PlanResult;
struct Scene;

// worst is the measured extreme of the checked quantity; the check passes when
// worst <= limit.
struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double limit = 0.0;
  std::string detail;
};

// One run of consecutive colliding sweep samples; length is the end-effector
// path length over the run.
struct CollisionRecord {
  int task = 0;
  int obstacle_id = 0;
  double t_L = 0.0;
  double t_R = 0.0;
  double length = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<CollisionRecord> collisions;
  bool pass() const;
  const CheckResult* find(const std::string& name) const;
};

// Re-evaluates the plan by dense sampling, using only the emitted curves, the
// scene and geometric primitives. Never throws on a failed check.
VerificationReport verify_plan(const PlanResult& result, const Scene& scene);

}  // namespace pickplan
