#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "sttneg/control.hpp"

namespace sttneg {

enum class DynamicsKind { OmniRobot, SingleIntegrator, CustomAffine };

std::string to_string(DynamicsKind kind);
DynamicsKind dynamics_kind_from_string(const std::string& name);

/// Ground-truth control-affine plant  x' = f(x) + g(x) u + d.
/// Only the simulator sees this; controllers never do.
struct DynamicsModel {
  using Drift = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using InputMap = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  DynamicsKind kind = DynamicsKind::SingleIntegrator;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  Drift drift;         // empty: zero drift
  InputMap input_map;  // empty: identity

  /// Three-wheeled omni robot: planar position + heading, body-frame
  /// velocities rotated by the heading.
  static DynamicsModel omni_robot();
  static DynamicsModel single_integrator(std::size_t n);
  static DynamicsModel custom_affine(std::size_t n, std::size_t m, Drift f, InputMap g);

  Eigen::MatrixXd g(const Eigen::VectorXd& x) const;
  Eigen::VectorXd rate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& d) const;
};

/// One classical RK4 step with u and d held over the step.
Eigen::VectorXd step_dynamics(const DynamicsModel& model, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, const Eigen::VectorXd& d, double dt);

/// Channel map that premultiplies the per-dimension control by the inverse
/// (pseudo-inverse for non-square) input matrix, e.g. R(theta)^T for the omni
/// robot.
ChannelMap inverse_input_map(const DynamicsModel& model);

}  // namespace sttneg
