#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "dualact/hamiltonian.hpp"

namespace dualact {

struct ConjugateOptions {
  double tol = 1e-10;   // stopping residual |grad H(t,u) - v|
  int max_iters = 100;  // Newton iteration cap
};

/// Result of one Legendre-Fenchel conjugation H*(t,v).
///
/// Fenchel-Young holds with equality at the result:
///   H(t, argmax) + value == <argmax, v> within the Newton tolerance,
/// and argmax is grad H*(t,v) = (grad H)^{-1}(t, v).
struct ConjugateResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
  int iterations = 0;
  double residual = 0.0;
};

/// H*(t,v) = sup_u [ <u,v> - H(t,u) ] for strictly convex superlinear H,
/// computed by damped Newton on the concave inner problem (Hessian solve plus
/// Armijo backtracking). Throws ConvexityError if a Hessian fails to be
/// positive definite and ConvergenceError past the iteration cap.
ConjugateResult conjugate(const HamiltonianModel& model, const Eigen::VectorXd& t,
                          const Eigen::VectorXd& v, const Eigen::VectorXd* guess = nullptr,
                          const ConjugateOptions& opts = {});

/// grad H*(t,v), i.e. the argmax of the conjugation (the inverse gradient map).
Eigen::VectorXd grad_conjugate(const HamiltonianModel& model, const Eigen::VectorXd& t,
                               const Eigen::VectorXd& v, const Eigen::VectorXd* guess = nullptr,
                               const ConjugateOptions& opts = {});

struct GrowthViolation {
  Eigen::VectorXd t;
  Eigen::VectorXd v;
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
};

/// Report for the conjugate growth envelope
///   alpha^{-1}/2 |v|^2 - gamma(t) <= H*(t,v) <= delta^{-1}/2 |v|^2 + beta(t).
/// envelope_error spot-checks the quadratic envelope identity
///   max_u (<v,u> - alpha/2 |u|^2 - gamma) = alpha^{-1}/2 |v|^2 - gamma
/// by running the same inner maximization on the pure quadratic.
struct GrowthReport {
  bool passed = false;
  std::size_t checked = 0;
  std::vector<GrowthViolation> violations;
  double envelope_error = 0.0;
};

GrowthReport check_growth_bounds(const HamiltonianModel& model,
                                 const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples,
                                 const ConjugateOptions& opts = {});

struct GradientBoundViolation {
  Eigen::VectorXd t;
  Eigen::VectorXd v;
  double norm = 0.0;
  double bound = 0.0;
};

/// Report for the affine bound |grad H*(t,v)| <= C1 |v| + C2 (beta+gamma+1).
/// fitted_c1/c2 are the least-squares constants over the samples (clamped to
/// be nonnegative), scaled up just enough to be feasible, for documentation.
struct GradientBoundReport {
  bool passed = false;
  std::size_t checked = 0;
  double c1 = 0.0;
  double c2 = 0.0;
  double fitted_c1 = 0.0;
  double fitted_c2 = 0.0;
  std::vector<GradientBoundViolation> violations;
};

GradientBoundReport check_gradient_bound(
    const HamiltonianModel& model,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples, double c1, double c2,
    const ConjugateOptions& opts = {});

}  // namespace dualact
