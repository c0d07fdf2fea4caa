#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "pickplan/error.hpp"
#include "pickplan/pipeline.hpp"
#include "pickplan/report.hpp"
#include "pickplan/scene.hpp"

namespace {

using namespace pickplan;

enum Exit { kPass = 0, kPlanningFailure = 2, kVerificationFailure = 3, kSceneError = 4 };

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PLANNER_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void print_checks(const VerificationReport& rep) {
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " worst=" << c.worst << " limit=" << c.limit << "\n";
  for (const auto& c : rep.collisions)
    std::cout << "collision task=" << c.task << " obstacle=" << c.obstacle_id << " t=[" << c.t_L << ", " << c.t_R
              << "] length=" << c.length << "\n";
}

int exit_for(const PlanError& e) {
  return e.code() == ErrorCode::SceneError || e.stage() == Stage::Scene ? kSceneError : kPlanningFailure;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Aerial pick-and-place planner for a quadcopter with a Delta arm"};
  app.require_subcommand(1);

  std::string scene_path, out_dir, plan_dir, stage = "all";
  bool no_avoidance = false;
  double sample_dt = -1.0;
  std::optional<std::uint64_t> seed;

  CLI::App* plan = app.add_subcommand("plan", "plan a mission and export trajectory.csv and report.json");
  plan->add_option("--scene", scene_path, "scene JSON file")->required()->check(CLI::ExistingFile);
  plan->add_option("--out", out_dir, "output directory")->required();
  plan->add_flag("--disable-ee-avoidance", no_avoidance, "skip the iterative arm collision avoidance");
  plan->add_option("--sample-dt", sample_dt, "CSV sample step in seconds")->check(CLI::PositiveNumber);
  plan->add_option("--seed", seed, "override the scene seed");
  plan->add_option("--stage", stage, "moving|manipulation|all")->check(CLI::IsMember({"moving", "manipulation", "all"}));

  CLI::App* verify = app.add_subcommand("verify", "re-verify an exported plan against its scene");
  verify->add_option("--plan", plan_dir, "directory written by plan")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--scene", scene_path, "scene JSON file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  Scene scene;
  try {
    scene = load_scene(scene_path);
    if (seed) scene.seed = *seed;
  } catch (const PlanError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return kSceneError;
  }

  if (verify->parsed()) {
    try {
      const PlanResult result = parse_plan_json(read_text_file((std::filesystem::path(plan_dir) / "plan.json").string()));
      const VerificationReport rep = verify_plan(result, scene);
      print_checks(rep);
      std::cout << (rep.pass() ? "PASS" : "FAIL") << "\n";
      return rep.pass() ? kPass : kVerificationFailure;
    } catch (const PlanError& e) {
      std::cerr << "verify error: " << e.what() << "\n";
      return kVerificationFailure;
    }
  }

  ExportOptions opts;
  opts.sample_dt = sample_dt > 0.0 ? sample_dt : scene.params.sample_dt;
  opts.plan.ee_avoidance = !no_avoidance;
  opts.plan.stage = stage == "moving" ? PlanStage::Moving : stage == "manipulation" ? PlanStage::Manipulation : PlanStage::All;
  PlanResult result;
  try {
    result = plan_mission(scene, opts.plan);
  } catch (const PlanError& e) {
    std::cerr << "planning failed [stage " << to_string(e.stage()) << "]: " << e.what() << "\n";
    return exit_for(e);
  }
  try {
    export_plan(result, scene, out_dir, opts);
  } catch (const PlanError& e) {
    std::cerr << "export failed: " << e.what() << "\n";
    return kPlanningFailure;
  }
  spdlog::info("quad {:.1f} ms, end-effector {:.1f} ms, verify {:.1f} ms", result.timings.quad_ms, result.timings.ee_ms,
               result.timings.verify_ms);
  print_checks(result.verification);
  const bool ok = result.verification.pass();
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kPass : kVerificationFailure;
}
