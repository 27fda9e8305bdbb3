#include "sttneg/pipeline.hpp"

#include <algorithm>
#include <limits>

#include "sttneg/errors.hpp"

namespace sttneg {

bool Plan::ok() const { return failures().empty(); }

std::vector<Tube> Plan::tubes() const {
  std::vector<Tube> out;
  out.reserve(post.size());
  for (const auto& p : post) out.push_back(p.tube);
  return out;
}

std::vector<std::string> Plan::failures() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < validity.size(); ++i) {
    if (!validity[i].ok()) {
      out.push_back("agent " + std::to_string(scenario.agents[i].id) + ": " + validity[i].summary());
    }
  }
  if (!disjointness.clean) {
    out.push_back("tubes of agents " + std::to_string(disjointness.agent_i) + " and " +
                  std::to_string(disjointness.agent_j) + " intersect from t=" +
                  std::to_string(disjointness.first_violation) + " (" +
                  std::to_string(disjointness.intersecting_samples) + " samples)");
  }
  return out;
}

CircumventOptions circumvent_options(const Scenario& s, std::size_t i) {
  CircumventOptions o;
  o.clearance = s.tubes.clearance;
  o.padding = s.tubes.padding;
  o.dt_check = s.dt_check();
  o.detour_dims = s.agents[i].workspace_mask;
  return o;
}

std::vector<ReplanContext> replan_contexts(const Scenario& s) {
  std::vector<ReplanContext> out;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    out.push_back({s.state_target(i), s.state_arena(i), s.state_obstacles(i), s.tubes.width,
                   circumvent_options(s, i)});
  }
  return out;
}

NegotiationParams negotiation_params(const Scenario& s) {
  NegotiationParams p;
  p.dt_check = s.dt_check();
  p.delta = s.delta();
  p.blend = s.blend();
  p.max_iter = s.negotiation.max_iter;
  p.clear_freeze = s.negotiation.clear_freeze;
  return p;
}

void verify_plan(Plan& plan) {
  const Scenario& s = plan.scenario;
  plan.validity.clear();
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    plan.validity.push_back(verify_tube(plan.post[i].tube, s.state_start(i), s.state_target(i),
                                        s.state_arena(i), s.state_obstacles(i), s.dt_check()));
  }
  const Topology topo = s.topology();
  plan.disjointness = verify_disjointness(plan.tubes(), s.masks(), s.dt_check(), &topo);
}

Plan plan_scenario(const Scenario& s) {
  Plan plan;
  plan.scenario = s;
  const auto contexts = replan_contexts(s);
  std::vector<ParameterizedTube> working;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto& a = s.agents[i];
    try {
      Tube t = build_reachability_tube(s.state_start(i), contexts[i].target, a.t_p,
                                       contexts[i].arena, s.tubes.width, 0.0, a.id);
      t = circumvent_obstacles(t, contexts[i].obstacles, contexts[i].arena, contexts[i].circumvent);
      plan.pre.push_back(t);
      working.emplace_back(std::move(t));
    } catch (const InfeasibleScenario& e) {
      throw InfeasibleScenario("agent " + std::to_string(a.id) + ": " + e.what());
    } catch (const DegenerateTube& e) {
      throw DegenerateTube("agent " + std::to_string(a.id) + ": " + e.what());
    }
  }
  auto result = negotiate(std::move(working), s.masks(), contexts, s.topology(),
                          negotiation_params(s));
  plan.post = std::move(result.tubes);
  plan.log = std::move(result.log);
  verify_plan(plan);
  return plan;
}

std::vector<FleetMember> fleet_members(const Scenario& s, const std::vector<Tube>& tubes,
                                       std::uint64_t seed) {
  if (tubes.size() != s.agents.size()) throw DimensionMismatch("one tube per agent required");
  std::vector<FleetMember> out;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto& a = s.agents[i];
    FleetMember m;
    m.id = a.id;
    m.model = a.dynamics == DynamicsKind::OmniRobot ? DynamicsModel::omni_robot()
                                                    : DynamicsModel::single_integrator(a.state_dim);
    m.tube = tubes[i];
    m.gains.kappa = a.gains;
    m.disturbance.seed = seed;
    m.disturbance.process = s.simulation.process;
    if (a.d_max) {
      m.disturbance.bound = *a.d_max;
    } else {
      m.disturbance.bound.assign(a.state_dim, s.simulation.d_max_fraction * tubes[i].peak_slew());
    }
    m.start = s.state_start(i);
    m.target = s.state_target(i);
    m.x0.resize(static_cast<Eigen::Index>(a.state_dim));
    for (std::size_t k = 0; k < a.state_dim; ++k) {
      m.x0[static_cast<Eigen::Index>(k)] = a.x0 ? (*a.x0)[k] : m.start[k].center();
    }
    if (a.channel == "inverse_input") m.channel = inverse_input_map(m.model);
    m.obstacles = s.state_obstacles(i);
    m.mask = a.workspace_mask;
    m.stay_window = s.stay_window(i);
    out.push_back(std::move(m));
  }
  return out;
}

bool RunResult::ok() const { return !seeds.empty() && passed() == seeds.size(); }

std::size_t RunResult::passed() const {
  return static_cast<std::size_t>(
      std::count_if(seeds.begin(), seeds.end(), [](const SeedOutcome& o) { return o.ok; }));
}

double RunResult::min_pairwise_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& o : seeds) d = std::min(d, o.min_pairwise_distance);
  return d;
}

std::size_t RunResult::funnel_violations() const {
  std::size_t n = 0;
  for (const auto& o : seeds) n += o.funnel_violations;
  return n;
}

RunResult run_simulations(const Scenario& s, const std::vector<Tube>& tubes,
                          const RunOptions& options) {
  if (options.seeds == 0) throw InvalidArgument("at least one seed is required");
  RunResult result;
  FleetOptions fo;
  fo.dt = options.dt > 0.0 ? options.dt : s.sim_dt();
  fo.min_separation = s.simulation.min_separation;
  fo.threads = std::max(1u, options.threads);
  for (std::size_t k = 0; k < options.seeds; ++k) {
    const std::uint64_t seed = options.seed + k;
    fo.keep_trajectories = (k == 0);
    FleetReport report = simulate_fleet(fleet_members(s, tubes, seed), fo);
    result.seeds.push_back({seed, report.ok(), report.funnel_violations,
                            report.min_pairwise_distance, report.verdicts});
    if (k == 0) result.first = std::move(report);
  }
  return result;
}

}  // namespace sttneg
