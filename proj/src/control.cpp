#include "sttneg/control.hpp"

#include <cmath>
#include <string>

#include "sttneg/errors.hpp"

namespace sttneg {

ControllerGains ControllerGains::uniform(std::size_t n, double k) {
  return ControllerGains{std::vector<double>(n, k)};
}

void ControllerGains::validate(std::size_t n) const {
  if (kappa.size() != n) {
    throw DimensionMismatch("expected " + std::to_string(n) + " gains, got " +
                            std::to_string(kappa.size()));
  }
  for (double k : kappa) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("controller gains must be positive");
  }
}

double normalized_error(double x, double lo, double hi) {
  if (!(lo < hi)) {
    throw DegenerateTube("tube boundaries collapsed: lower " + std::to_string(lo) +
                         " >= upper " + std::to_string(hi));
  }
  return (x - 0.5 * (hi + lo)) / (0.5 * (hi - lo));
}

FunnelState funnel_state(double x, double lo, double hi, double kappa) {
  FunnelState f;
  const double e = normalized_error(x, lo, hi);
  f.inside = e > -1.0 && e < 1.0;
  f.e = std::clamp(e, -1.0 + kErrorClamp, 1.0 - kErrorClamp);
  f.eps = std::log1p(f.e) - std::log1p(-f.e);
  f.xi = 4.0 / ((1.0 - f.e * f.e) * (hi - lo));
  f.u = -kappa * f.xi * f.eps;
  return f;
}

double control_input(double x, double lo, double hi, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("gain must be positive");
  const FunnelState f = funnel_state(x, lo, hi, kappa);
  if (!f.inside) {
    throw FunnelViolation(0, std::nan(""),
                          "state " + std::to_string(x) + " outside funnel (" + std::to_string(lo) +
                              ", " + std::to_string(hi) + ")");
  }
  return f.u;
}

ControlOutput evaluate_control(const Eigen::VectorXd& state, const Tube& tube, double t,
                               const ControllerGains& gains, const ChannelMap& channel,
                               std::span<double> lo, std::span<double> hi) {
  const auto n = tube.size();
  if (static_cast<std::size_t>(state.size()) != n) {
    throw DimensionMismatch("state and tube dimensions differ");
  }
  tube.bounds(t, lo, hi);
  ControlOutput out;
  Eigen::VectorXd per_dim(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const FunnelState f = funnel_state(state[static_cast<Eigen::Index>(k)], lo[k], hi[k],
                                       gains.kappa[k]);
    if (!f.inside && !out.violated_dim) out.violated_dim = k;
    per_dim[static_cast<Eigen::Index>(k)] = f.u;
  }
  out.u = channel ? channel(state, per_dim) : per_dim;
  return out;
}

Eigen::VectorXd control_vector(const Eigen::VectorXd& state, const Tube& tube, double t,
                               const ControllerGains& gains, const ChannelMap& channel) {
  gains.validate(tube.size());
  std::vector<double> lo(tube.size()), hi(tube.size());
  ControlOutput out = evaluate_control(state, tube, t, gains, channel, lo, hi);
  if (out.violated_dim) {
    const auto k = *out.violated_dim;
    throw FunnelViolation(k, t,
                          "funnel violated in dimension " + std::to_string(k) + " at t=" +
                              std::to_string(t));
  }
  return out.u;
}

}  // namespace sttneg
