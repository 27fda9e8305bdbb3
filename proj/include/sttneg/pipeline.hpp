#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sttneg/negotiation.hpp"
#include "sttneg/scenario.hpp"
#include "sttneg/simulation.hpp"
#include "sttneg/tube.hpp"

namespace sttneg {

/// Tubes and reports produced by planning a scenario.
struct Plan {
  Scenario scenario;
  std::vector<Tube> pre;  // after obstacle circumvention, before negotiation
  std::vector<ParameterizedTube> post;
  NegotiationLog log;
  std::vector<ValidityReport> validity;  // of the negotiated tubes
  DisjointnessReport disjointness;

  bool ok() const;
  std::vector<Tube> tubes() const;
  /// Human-readable list of failed checks; empty when ok().
  std::vector<std::string> failures() const;
};

CircumventOptions circumvent_options(const Scenario& s, std::size_t i);
std::vector<ReplanContext> replan_contexts(const Scenario& s);
NegotiationParams negotiation_params(const Scenario& s);

/// Builds, circumvents and negotiates every tube, then re-verifies. Errors
/// carry the agent id.
Plan plan_scenario(const Scenario& s);

/// Re-runs the validity and disjointness checks for already-built tubes.
void verify_plan(Plan& plan);

/// Ready-to-simulate fleet for one disturbance seed.
std::vector<FleetMember> fleet_members(const Scenario& s, const std::vector<Tube>& tubes,
                                       std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::size_t funnel_violations = 0;
  double min_pairwise_distance = 0.0;
  std::vector<RasVerdict> verdicts;
};

struct RunResult {
  FleetReport first;  // full report, with trajectories, of the first seed
  std::vector<SeedOutcome> seeds;

  bool ok() const;
  std::size_t passed() const;
  double min_pairwise_distance() const;
  std::size_t funnel_violations() const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  double dt = 0.0;  // 0: scenario default
  unsigned threads = 1;
};

RunResult run_simulations(const Scenario& s, const std::vector<Tube>& tubes,
                          const RunOptions& options);

}  // namespace sttneg
