#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sttneg/errors.hpp"
#include "sttneg/tube.hpp"

namespace sttneg {

using Mask = std::vector<std::size_t>;

/// Communication graph and token order. Agents are addressed by index into
/// the tube set; `ids` carries the user-facing agent numbers.
struct Topology {
  std::vector<int> ids;
  /// Undirected edges as index pairs; empty means fully connected.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// Permutation of indices; empty means ascending.
  std::vector<std::size_t> token_order;

  static Topology fully_connected(std::vector<int> ids);
  std::size_t size() const { return ids.size(); }
  std::vector<std::size_t> neighbors(std::size_t i) const;
  std::vector<std::size_t> order() const;
  void validate() const;
};

struct CollisionInterval {
  int agent = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<int> neighbors;
};

/// Overlap of the workspace projections of two tubes at time t.
bool tubes_overlap(const Tube& a, const Mask& mask_a, const Tube& b, const Mask& mask_b, double t);

/// Earliest/latest overlap of tube `i` with any neighbour, or nothing.
/// `neighbors` empty means every other tube.
std::optional<CollisionInterval> detect_collision_interval(
    std::size_t i, const std::vector<Tube>& tubes, const std::vector<Mask>& masks,
    double dt_check, const std::vector<std::size_t>& neighbors = {});

struct FreezeRecord {
  double t_lo = 0.0;
  double t_hi = 0.0;      // end of the frozen plateau
  double delta = 0.0;
  double blend = 0.0;     // width of the entry fade [t_lo - blend, t_lo]
  HyperRect frozen;
  Tube tail;
};

/// Tube after zero or more freeze-and-replan updates.
struct ParameterizedTube {
  Tube base;
  Tube tube;
  std::vector<FreezeRecord> freezes;

  ParameterizedTube() = default;
  explicit ParameterizedTube(Tube t) : base(t), tube(std::move(t)) {}
  std::size_t revision() const { return freezes.size(); }
};

/// What an agent needs to replan its own tail: target, arena, obstacles and
/// the tube-construction knobs.
struct ReplanContext {
  HyperRect target;
  HyperRect arena;
  ObstacleSet obstacles;
  WidthPolicy width;
  CircumventOptions circumvent;
};

/// Freeze at the cross-section from `delta` before the collision and replan
/// a fresh tube to the target after the interval. With `blend` > 0 the
/// boundaries fade C1 into the frozen box over [t_lo - blend/2, t_lo]; the
/// tube is untouched before that and equals the frozen box on [t_lo, t_hi].
ParameterizedTube parameterize_tube(const ParameterizedTube& current,
                                    const std::optional<CollisionInterval>& interval,
                                    double delta, const ReplanContext& ctx, double blend);

struct NegotiationParams {
  double dt_check = 0.0;
  double delta = -1.0;    // negative: 2 * dt_check
  double blend = -1.0;    // negative: 4 * dt_check
  std::size_t max_iter = 0;  // 0: 10 * N
  /// Start the freeze early enough that the held box stays clear of every
  /// neighbour through the end of the collision interval. Off: freeze at
  /// the first contact.
  bool clear_freeze = true;
};

struct ExaminedTube {
  int agent = 0;
  std::size_t revision = 0;
};

struct NegotiationRecord {
  std::size_t iter = 0;
  int hub = 0;
  std::vector<ExaminedTube> examined;
  std::optional<CollisionInterval> interval;
  std::string action;  // "parameterized" or "none"
};

struct NegotiationLog {
  std::vector<NegotiationRecord> records;

  std::size_t iterations() const { return records.empty() ? 0 : records.back().iter; }
  std::size_t updates() const;
  /// One JSON object per line:
  ///   {"iter", "hub", "examined", "conflict_pair", "t_lo", "t_hi", "action"}
  std::string to_jsonl() const;
  static NegotiationLog from_jsonl(const std::string& text);
};

class NegotiationDidNotTerminate : public Error {
 public:
  NegotiationDidNotTerminate(const std::string& what, NegotiationLog log)
      : Error(what), log_(std::move(log)) {}
  const NegotiationLog& log() const { return log_; }

 private:
  NegotiationLog log_;
};

struct NegotiationResult {
  std::vector<ParameterizedTube> tubes;
  NegotiationLog log;
};

NegotiationResult negotiate(std::vector<ParameterizedTube> tubes,
                            const std::vector<Mask>& masks,
                            const std::vector<ReplanContext>& contexts, const Topology& topology,
                            const NegotiationParams& params);

struct DisjointnessReport {
  bool clean = true;
  std::size_t intersecting_samples = 0;
  int agent_i = 0;
  int agent_j = 0;
  double first_violation = 0.0;
};

DisjointnessReport verify_disjointness(const std::vector<Tube>& tubes,
                                       const std::vector<Mask>& masks, double dt_check,
                                       const Topology* topology = nullptr);

}  // namespace sttneg
