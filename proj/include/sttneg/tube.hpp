#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sttneg/curve.hpp"
#include "sttneg/geometry.hpp"

namespace sttneg {

/// Spatiotemporal tube: per-dimension lower/upper boundary profiles over
/// [t_start, horizon].
class Tube {
 public:
  Tube() = default;
  Tube(int agent, double t_start, double horizon, std::vector<BoundaryProfile> dims);

  int agent() const { return agent_; }
  double t_start() const { return t_start_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return dims_.size(); }
  const BoundaryProfile& dim(std::size_t k) const { return dims_[k]; }
  BoundaryProfile& dim(std::size_t k) { return dims_[k]; }
  const std::vector<BoundaryProfile>& dims() const { return dims_; }

  /// Cross-section at t; throws outside [t_start, horizon].
  HyperRect at(double t) const;
  /// Cross-section with t clamped into the horizon (holds the end boxes).
  HyperRect at_clamped(double t) const;
  /// Allocation-free evaluation for tight loops; t is clamped.
  void bounds(double t, std::span<double> lo, std::span<double> hi) const;

  /// Largest |boundary slope| over a uniform grid.
  double peak_slew(std::size_t samples = 2000) const;

  bool operator==(const Tube& o) const = default;

 private:
  int agent_ = 0;
  double t_start_ = 0.0;
  double horizon_ = 0.0;
  std::vector<BoundaryProfile> dims_;
};

HyperRect tube_cross_section(const Tube& tube, double t);

/// Fraction of the start/target width trimmed from the tube ends, half on
/// each side. Zero keeps the tube ends equal to the sets themselves.
struct WidthPolicy {
  double start_inset = 0.0;
  double end_inset = 0.0;
};

Tube build_reachability_tube(const HyperRect& start, const HyperRect& target, double t_p,
                             const HyperRect& arena, const WidthPolicy& width = {},
                             double t_start = 0.0, int agent = 0);

struct ObstacleSet {
  int agent = 0;
  std::vector<HyperRect> obstacles;
  std::vector<std::string> names;

  std::size_t count() const { return obstacles.size(); }
  std::string name(std::size_t j) const;
};

struct CircumventOptions {
  /// Negative selects the default: 2% of the arena span of the detour dimension.
  double clearance = -1.0;
  double dt_check = 0.0;
  /// Padding of the bump on each side, as a fraction of the blocking window.
  double padding = 0.1;
  /// Dimensions allowed for detours; empty means every dimension.
  std::vector<std::size_t> detour_dims;
  std::size_t max_rounds = 0;  // 0: 8 * (#obstacles + 1)
};

Tube circumvent_obstacles(const Tube& tube, const ObstacleSet& obstacles,
                          const HyperRect& arena, const CircumventOptions& options);

struct PropertyCheck {
  bool ok = true;
  double first_violation = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct ValidityReport {
  PropertyCheck ordered;    // lower < upper everywhere
  PropertyCheck arena;
  PropertyCheck start;
  PropertyCheck end;
  PropertyCheck obstacles;

  bool ok() const { return ordered.ok && arena.ok && start.ok && end.ok && obstacles.ok; }
  std::string summary() const;
};

ValidityReport verify_tube(const Tube& tube, const HyperRect& start, const HyperRect& target,
                           const HyperRect& arena, const ObstacleSet& obstacles, double dt_check);

}  // namespace sttneg
