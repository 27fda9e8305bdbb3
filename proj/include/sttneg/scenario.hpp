#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sttneg/dynamics.hpp"
#include "sttneg/geometry.hpp"
#include "sttneg/negotiation.hpp"
#include "sttneg/simulation.hpp"
#include "sttneg/tube.hpp"

namespace sttneg {

inline constexpr int kScenarioSchemaVersion = 1;

struct NamedBox {
  std::string name;
  HyperRect box;
};

/// One agent of a scenario. Start, target and obstacles are given in
/// workspace coordinates; state dimensions outside the workspace mask get a
/// constant tube over `aux_ranges`.
struct AgentSpec {
  int id = 0;
  DynamicsKind dynamics = DynamicsKind::SingleIntegrator;
  std::size_t state_dim = 0;
  Mask workspace_mask;
  std::vector<std::pair<std::size_t, Interval>> aux_ranges;
  HyperRect start;
  HyperRect target;
  double t_p = 0.0;
  std::vector<double> gains;
  std::optional<std::vector<double>> d_max;
  std::optional<std::vector<double>> x0;
  std::string channel = "identity";  // or "inverse_input"
  std::vector<NamedBox> obstacles;   // in addition to the global ones
};

struct NegotiationConfig {
  std::optional<double> dt_check;
  std::optional<double> delta;
  std::optional<double> blend;
  std::size_t max_iter = 0;
  bool clear_freeze = true;
  std::vector<int> token_order;  // agent ids; empty: ascending
  std::vector<std::pair<int, int>> edges;  // empty: fully connected
};

struct SimulationConfig {
  std::optional<double> dt;
  std::size_t seeds = 1;
  std::uint64_t seed = 1;
  double stay_fraction = 0.05;
  double d_max_fraction = 0.05;
  DisturbanceProcess process = DisturbanceProcess::Uniform;
  double min_separation = 0.0;
};

struct TubeConfig {
  double clearance = -1.0;
  double padding = 0.1;
  WidthPolicy width;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  HyperRect arena;  // workspace
  std::vector<NamedBox> obstacles;
  std::vector<AgentSpec> agents;
  NegotiationConfig negotiation;
  SimulationConfig simulation;
  TubeConfig tubes;

  std::size_t index_of(int id) const;

  // Geometry lifted into each agent's full state space.
  HyperRect state_arena(std::size_t i) const;
  HyperRect state_start(std::size_t i) const;
  HyperRect state_target(std::size_t i) const;
  ObstacleSet state_obstacles(std::size_t i) const;

  double dt_check() const;
  double delta() const;
  double blend() const;
  double sim_dt() const;
  double stay_window(std::size_t i) const;
  Topology topology() const;
  std::vector<Mask> masks() const;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);

/// Start/target containment in the arena, obstacle-free endpoints, pairwise
/// disjoint starts and targets. Throws ValidationError naming the sets.
void validate_scenario(const Scenario& s);

}  // namespace sttneg
