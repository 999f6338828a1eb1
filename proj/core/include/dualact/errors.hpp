#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dualact {

/// Hessian of the Hamiltonian failed to be positive definite at a queried point.
class ConvexityError : public std::runtime_error {
public:
  ConvexityError(std::string what, std::vector<double> t, std::vector<double> u)
      : std::runtime_error(std::move(what)), t_(std::move(t)), u_(std::move(u)) {}

  const std::vector<double>& time_point() const noexcept { return t_; }
  const std::vector<double>& point() const noexcept { return u_; }

private:
  std::vector<double> t_;
  std::vector<double> u_;
};

/// An iterative solve hit its iteration cap or the line search collapsed.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(std::string what, double best_residual, int iterations)
      : std::runtime_error(std::move(what)),
        best_residual_(best_residual),
        iterations_(iterations) {}

  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double best_residual_;
  int iterations_;
};

/// Velocity Hessian of a Lagrangian is singular where it must be invertible.
class DegenerateLagrangianError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario file parse or validation failure; line == 0 when not tied to a line.
class ScenarioError : public std::runtime_error {
public:
  explicit ScenarioError(std::string what, int line = 0)
      : std::runtime_error(std::move(what)), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace dualact
