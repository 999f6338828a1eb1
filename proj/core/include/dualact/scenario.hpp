#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dualact/derivative.hpp"
#include "dualact/grid.hpp"
#include "dualact/hamiltonian.hpp"
#include "dualact/lagrangian.hpp"
#include "dualact/solver.hpp"

namespace dualact {

enum class ModelKind {
  Quadratic,
  TimeScaledQuadratic,
  QuarticRadial,
  HarmonicOscillator,
  Helmholtz,
  FreeField,
};

struct ScenarioGrowth {
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;   // constant beta(t)
  double gamma = 0.0;  // constant gamma(t)
  double c1 = 0.0;     // affine gradient-bound constants
  double c2 = 0.0;
};

struct ScenarioModel {
  ModelKind kind = ModelKind::Quadratic;
  int n = 1;
  Eigen::MatrixXd matrix;       // quadratic families
  Eigen::VectorXd offset;       // linear term
  std::string scaling;          // time-scaled id: "one-plus-t1"
  double quartic_a = 1.0;
  double quartic_b = 1.0;
  std::optional<ScenarioGrowth> growth;
};

struct ScenarioSolve {
  Optimizer optimizer = Optimizer::Lbfgs;
  int max_iters = 500;
  double grad_tol = 1e-8;
  int lbfgs_memory = 10;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Zero;
  int init_kmax = 2;
  double init_amplitude = 1.0;
  int newton_max_inner = 400;
  double newton_inner_tol = 1e-3;
};

/// Per-scenario acceptance tolerances for the verification steps.
struct ScenarioChecks {
  std::optional<double> hamilton_residual;  // grid-L2 bound for verify
  std::optional<double> mean_shift;         // sup-norm bound for the mean-shift identity
  std::optional<double> first_integral;     // drift bound for conserve (p = 1)
  std::optional<double> divergence;         // tensor divergence bound for conserve
};

struct ScenarioConjugateCheck {
  int samples = 1000;
  double box = 2.0;  // samples drawn uniformly from [-box, box]^(n+np)
  std::uint64_t seed = 1;
  double tol_value = 1e-9;    // |H* - closed form| for self-checkable models
  double tol_inverse = 1e-8;  // |grad H*(grad H(u)) - u|
};

struct ScenarioSweep {
  std::vector<std::size_t> resolutions;
  double expected_order = 2.0;
  double order_tol = 0.2;
};

struct Scenario {
  std::string name;
  std::vector<double> periods;
  std::vector<std::size_t> resolution;
  DerivativeScheme scheme = DerivativeScheme::Central2;
  ScenarioModel model;
  std::optional<std::string> reference;  // analytic reference id
  std::optional<ScenarioSolve> solve;
  ScenarioChecks checks;
  std::optional<ScenarioConjugateCheck> conjugate_check;
  std::optional<ScenarioSweep> sweep;

  MultiTimeGrid make_grid() const;
  MultiTimeGrid make_grid(const std::vector<std::size_t>& resolution_override) const;
  /// Throws ScenarioError for model kinds without a strictly convex Hamiltonian.
  HamiltonianModel make_hamiltonian() const;
  bool has_lagrangian() const;
  LagrangianModel make_lagrangian() const;
  SolveConfig make_solve_config() const;
};

/// Parses and validates a scenario file; throws ScenarioError with a line
/// number on parse errors and with the offending field named on validation
/// errors.
Scenario parse_scenario_file(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin);

}  // namespace dualact
