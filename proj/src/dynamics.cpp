#include "sttneg/dynamics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sttneg/errors.hpp"

namespace sttneg {

std::string to_string(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::OmniRobot:
      return "omni_robot";
    case DynamicsKind::SingleIntegrator:
      return "single_integrator";
    case DynamicsKind::CustomAffine:
      return "custom_affine";
  }
  return "unknown";
}

DynamicsKind dynamics_kind_from_string(const std::string& name) {
  if (name == "omni_robot") return DynamicsKind::OmniRobot;
  if (name == "single_integrator") return DynamicsKind::SingleIntegrator;
  if (name == "custom_affine") return DynamicsKind::CustomAffine;
  throw InvalidArgument("unknown dynamics kind '" + name + "'");
}

DynamicsModel DynamicsModel::omni_robot() {
  DynamicsModel m;
  m.kind = DynamicsKind::OmniRobot;
  m.state_dim = 3;
  m.input_dim = 3;
  return m;
}

DynamicsModel DynamicsModel::single_integrator(std::size_t n) {
  DynamicsModel m;
  m.kind = DynamicsKind::SingleIntegrator;
  m.state_dim = n;
  m.input_dim = n;
  return m;
}

DynamicsModel DynamicsModel::custom_affine(std::size_t n, std::size_t m_in, Drift f, InputMap g) {
  DynamicsModel m;
  m.kind = DynamicsKind::CustomAffine;
  m.state_dim = n;
  m.input_dim = m_in;
  m.drift = std::move(f);
  m.input_map = std::move(g);
  return m;
}

Eigen::MatrixXd DynamicsModel::g(const Eigen::VectorXd& x) const {
  const auto n = static_cast<Eigen::Index>(state_dim);
  const auto m = static_cast<Eigen::Index>(input_dim);
  switch (kind) {
    case DynamicsKind::OmniRobot: {
      Eigen::MatrixXd r = Eigen::MatrixXd::Identity(3, 3);
      const double c = std::cos(x[2]), s = std::sin(x[2]);
      r(0, 0) = c;
      r(0, 1) = -s;
      r(1, 0) = s;
      r(1, 1) = c;
      return r;
    }
    case DynamicsKind::SingleIntegrator:
      return Eigen::MatrixXd::Identity(n, m);
    case DynamicsKind::CustomAffine:
      return input_map ? input_map(x) : Eigen::MatrixXd::Identity(n, m);
  }
  return Eigen::MatrixXd::Identity(n, m);
}

Eigen::VectorXd DynamicsModel::rate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& d) const {
  switch (kind) {
    case DynamicsKind::OmniRobot: {
      const double c = std::cos(x[2]), s = std::sin(x[2]);
      Eigen::VectorXd v(3);
      v[0] = c * u[0] - s * u[1] + d[0];
      v[1] = s * u[0] + c * u[1] + d[1];
      v[2] = u[2] + d[2];
      return v;
    }
    case DynamicsKind::SingleIntegrator:
      return u + d;
    case DynamicsKind::CustomAffine: {
      Eigen::VectorXd v = input_map ? Eigen::VectorXd(input_map(x) * u) : u;
      if (drift) v += drift(x);
      return v + d;
    }
  }
  return d;
}

Eigen::VectorXd step_dynamics(const DynamicsModel& model, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, const Eigen::VectorXd& d, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("integration step must be positive");
  if (static_cast<std::size_t>(x.size()) != model.state_dim ||
      static_cast<std::size_t>(u.size()) != model.input_dim ||
      static_cast<std::size_t>(d.size()) != model.state_dim) {
    throw DimensionMismatch("state/input/disturbance sizes do not match the model");
  }
  const Eigen::VectorXd k1 = model.rate(x, u, d);
  const Eigen::VectorXd k2 = model.rate(x + 0.5 * dt * k1, u, d);
  const Eigen::VectorXd k3 = model.rate(x + 0.5 * dt * k2, u, d);
  const Eigen::VectorXd k4 = model.rate(x + dt * k3, u, d);
  Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalBlowup("state became non-finite during integration");
  return next;
}

ChannelMap inverse_input_map(const DynamicsModel& model) {
  if (model.kind == DynamicsKind::OmniRobot) {
    return [](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
      const double c = std::cos(x[2]), s = std::sin(x[2]);
      Eigen::VectorXd out(3);
      out[0] = c * v[0] + s * v[1];
      out[1] = -s * v[0] + c * v[1];
      out[2] = v[2];
      return out;
    };
  }
  if (model.kind == DynamicsKind::SingleIntegrator) return {};
  return [model](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    const Eigen::MatrixXd g = model.g(x);
    return Eigen::VectorXd(g.completeOrthogonalDecomposition().solve(v));
  };
}

}  // namespace sttneg
