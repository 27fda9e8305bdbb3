#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "sttneg/negotiation.hpp"
#include "sttneg/pipeline.hpp"

namespace sttneg {

// Artifact directory layout:
//   scenario.json        normalised scenario
//   tubes_pre.json       tubes after obstacle circumvention
//   tubes_post.json      negotiated tubes with their freeze records
//   negotiation.jsonl    one record per hub visit
//   plan_report.json     validity and disjointness results
//   trajectories/agent_<id>.csv, events.jsonl, verdicts.json, summary.json
//                        written by a simulation run

nlohmann::json to_json(const ParameterizedTube& p);
ParameterizedTube parameterized_from_json(const nlohmann::json& j);

nlohmann::json plan_report_json(const Plan& plan);
nlohmann::json verdict_json(const RasVerdict& v);
nlohmann::json run_summary_json(const RunResult& run);

void save_plan(const Plan& plan, const std::string& dir);
/// Reloads tubes, log and reports exactly as saved; no recomputation.
Plan load_plan(const std::string& dir);

void save_run(const RunResult& run, const std::string& dir);
bool has_run(const std::string& dir);
std::vector<Trajectory> load_trajectories(const std::string& dir, const Scenario& s);

struct VerifyReport {
  std::vector<std::string> passed;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// Re-checks a saved artifact directory: tube validity, pairwise
/// disjointness and, when present, trajectory verdicts. Recomputed results
/// must agree with the stored reports.
VerifyReport verify_artifacts(const std::string& dir);

/// Writes uniformly sampled tube boundaries (pre and post negotiation, one
/// table per agent and workspace dimension), collision-interval markers and
/// resampled trajectories. Returns the files written.
std::vector<std::string> export_plot_data(const std::string& dir, std::size_t samples,
                                          const std::string& out_dir);

}  // namespace sttneg
