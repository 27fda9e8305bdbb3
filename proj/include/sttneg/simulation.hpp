#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sttneg/control.hpp"
#include "sttneg/dynamics.hpp"
#include "sttneg/geometry.hpp"
#include "sttneg/negotiation.hpp"
#include "sttneg/tube.hpp"

namespace sttneg {

enum class DisturbanceProcess { Uniform, TruncatedNormal, ConstantBias };

std::string to_string(DisturbanceProcess p);
DisturbanceProcess disturbance_process_from_string(const std::string& name);

struct DisturbanceSpec {
  std::vector<double> bound;  // per state dimension, state-rate units
  std::uint64_t seed = 0;
  DisturbanceProcess process = DisturbanceProcess::Uniform;
};

/// Private random stream for one agent, derived from (seed, agent id) so that
/// results never depend on scheduling.
class DisturbanceSource {
 public:
  DisturbanceSource(const DisturbanceSpec& spec, int agent);
  Eigen::VectorXd next();

 private:
  DisturbanceSpec spec_;
  std::mt19937_64 rng_;
  std::optional<Eigen::VectorXd> bias_;
};

struct TrajectoryEvent {
  std::string kind;  // "reach", "funnel_violation", "funnel_recovered"
  double t = 0.0;
  int dim = -1;
};

/// Uniformly sampled closed-loop record, stored column-wise.
struct Trajectory {
  int agent = 0;
  std::size_t n = 0;  // state dimension
  std::size_t m = 0;  // input dimension
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> x;      // size() * n
  std::vector<double> u;      // size() * m
  std::vector<double> lower;  // size() * n
  std::vector<double> upper;  // size() * n
  std::vector<std::uint8_t> contained;
  std::vector<TrajectoryEvent> events;

  std::size_t size() const { return t.size(); }
  Eigen::Map<const Eigen::VectorXd> state(std::size_t k) const {
    return {x.data() + k * n, static_cast<Eigen::Index>(n)};
  }
  std::size_t violation_count() const;

  /// Header: t,x1..xn,u1..um,lower1,upper1,...,lowern,uppern,contained
  std::string to_csv() const;
  static Trajectory from_csv(const std::string& text, int agent = 0);
  std::string events_jsonl() const;
};

struct SimulationOptions {
  double dt = 1e-3;
  double stay_window = 0.0;
  ChannelMap channel;
  std::optional<HyperRect> target;  // for the reach event
};

/// Closed loop of the funnel controller on the ground-truth plant over
/// [0, horizon + stay_window]. Funnel violations are logged, not fatal.
Trajectory simulate_agent(const DynamicsModel& model, const Tube& tube,
                          const ControllerGains& gains, const DisturbanceSpec& disturbance,
                          const Eigen::VectorXd& x0, const SimulationOptions& options);

struct RasVerdict {
  int agent = 0;
  bool reach = false;
  double reach_time = std::numeric_limits<double>::quiet_NaN();
  bool avoid = true;
  double avoid_violation_time = std::numeric_limits<double>::quiet_NaN();
  bool stay = false;
  bool contained = true;
  bool collision_free = true;
  double min_distance = std::numeric_limits<double>::infinity();

  bool ok() const { return reach && avoid && stay && contained && collision_free; }
};

/// Reach/avoid/stay judged on the samples alone. Obstacles share the state
/// dimensions of the trajectory.
RasVerdict evaluate_ras(const Trajectory& trajectory, const HyperRect& start,
                        const HyperRect& target, const ObstacleSet& obstacles, double t_p,
                        double stay_window);

struct FleetMember {
  int id = 0;
  DynamicsModel model;
  Tube tube;
  ControllerGains gains;
  DisturbanceSpec disturbance;
  Eigen::VectorXd x0;
  ChannelMap channel;
  HyperRect start;
  HyperRect target;
  ObstacleSet obstacles;
  Mask mask;
  double stay_window = 0.0;
};

struct FleetOptions {
  double dt = 1e-3;
  double min_separation = 0.0;
  unsigned threads = 1;
  bool keep_trajectories = true;
};

struct FleetReport {
  std::vector<Trajectory> trajectories;  // empty when not kept
  std::vector<RasVerdict> verdicts;
  double min_pairwise_distance = std::numeric_limits<double>::infinity();
  int closest_i = 0;
  int closest_j = 0;
  double closest_t = 0.0;
  bool collision_free = true;
  bool all_contained = true;
  std::size_t funnel_violations = 0;

  bool ok() const;
};

/// Simulates every member independently (no coupling after negotiation) and
/// evaluates per-agent verdicts and pairwise workspace separation.
FleetReport simulate_fleet(const std::vector<FleetMember>& members, const FleetOptions& options);

/// Verdicts and pairwise separation for already simulated trajectories.
FleetReport assess_fleet(std::vector<Trajectory> trajectories,
                         const std::vector<FleetMember>& members, double min_separation,
                         bool keep_trajectories = true);

/// Euclidean distance between the masked positions of two states.
double workspace_distance(std::span<const double> a, const Mask& ma, std::span<const double> b,
                          const Mask& mb);

}  // namespace sttneg
