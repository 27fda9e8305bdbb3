#pragma once

#include <stdexcept>
#include <string>

namespace sttneg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Scenario cannot be realised by any tube: endpoints outside the arena,
// or an obstacle blocks every detour.
class InfeasibleScenario : public Error {
 public:
  using Error::Error;
};

// Collision interval reaches the end of the horizon, so no time is left to
// replan the tail.
class CannotReplan : public Error {
 public:
  using Error::Error;
};

class DegenerateTube : public Error {
 public:
  using Error::Error;
};

class FunnelViolation : public Error {
 public:
  FunnelViolation(std::size_t dim, double t, const std::string& what)
      : Error(what), dim_(dim), t_(t) {}
  std::size_t dim() const { return dim_; }
  double time() const { return t_; }

 private:
  std::size_t dim_;
  double t_;
};

class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sttneg
