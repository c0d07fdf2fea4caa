#pragma once

#include <string>

#include "pickplan/pipeline.hpp"

namespace pickplan {

struct ExportOptions {
  double sample_dt = 0.01;
  PlanOptions plan;
};

// Columns t_s, body, px..az, stage; one row per body per sample time. Sample
// times are t_begin + k dt with the horizon end appended, so each body gets
// ceil(horizon / dt) + 1 rows. Stage Manipulation keeps only rows inside
// manipulation windows.
std::string trajectory_csv(const PlanResult& result, const ExportOptions& options);

// Deterministic summary: timeline, iteration traces, verification checks.
std::string report_json(const PlanResult& result, const Scene& scene, const ExportOptions& options);

// Curves, corridor cells and timeline; enough for verify_plan to re-run.
std::string plan_json(const PlanResult& result);
PlanResult parse_plan_json(const std::string& text);

// Wall-clock stage timings. Kept apart from the report so that file is byte-stable.
std::string timing_json(const PlanResult& result);

// Writes trajectory.csv, report.json, plan.json and timing.json into dir
// (created if missing). Throws IoError.
void export_plan(const PlanResult& result, const Scene& scene, const std::string& dir, const ExportOptions& options);

std::string read_text_file(const std::string& path);

}  // namespace pickplan
