#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sttneg/tube.hpp"

namespace sttneg {

/// Per-dimension positive gains of the funnel law.
struct ControllerGains {
  std::vector<double> kappa;

  static ControllerGains uniform(std::size_t n, double k);
  void validate(std::size_t n) const;
};

/// Intermediate quantities of the funnel law for one dimension.
struct FunnelState {
  double e = 0.0;    // normalised error in (-1, 1)
  double eps = 0.0;  // ln((1 + e) / (1 - e))
  double xi = 0.0;   // 4 / ((1 - e^2) (hi - lo))
  double u = 0.0;
  bool inside = true;
};

inline constexpr double kErrorClamp = 1e-9;

/// (x - centre) / half-width; throws DegenerateTube when lo >= hi.
double normalized_error(double x, double lo, double hi);

/// u = -kappa * xi * eps. Throws FunnelViolation unless lo < x < hi.
double control_input(double x, double lo, double hi, double kappa);

/// Non-throwing variant: e is clamped to +-(1 - 1e-9) before evaluating the
/// logarithm, and `inside` reports whether the unclamped state was strictly
/// inside the tube.
FunnelState funnel_state(double x, double lo, double hi, double kappa);

/// Maps the per-dimension control vector onto the physical input. An empty
/// map is the identity.
using ChannelMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& state,
                                                 const Eigen::VectorXd& per_dim)>;

struct ControlOutput {
  Eigen::VectorXd u;
  std::optional<std::size_t> violated_dim;
};

/// Applies the funnel law on every tube dimension and then the channel map.
/// Throws FunnelViolation naming the first dimension outside its tube.
Eigen::VectorXd control_vector(const Eigen::VectorXd& state, const Tube& tube, double t,
                               const ControllerGains& gains, const ChannelMap& channel = {});

/// Guarded evaluation used inside simulation loops; never throws on
/// containment loss. `lo`/`hi` receive the tube bounds at t.
ControlOutput evaluate_control(const Eigen::VectorXd& state, const Tube& tube, double t,
                               const ControllerGains& gains, const ChannelMap& channel,
                               std::span<double> lo, std::span<double> hi);

}  // namespace sttneg
