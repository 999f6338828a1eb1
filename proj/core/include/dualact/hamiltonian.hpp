#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>

namespace dualact {

/// Quadratic growth envelope constants for a Hamiltonian:
///   delta/2 |u|^2 - beta(t) <= H(t,u) <= alpha/2 |u|^2 + gamma(t),
/// with 0 < delta <= alpha and beta, gamma nonnegative. Supplied by the
/// scenario and verified empirically, never inferred.
struct GrowthMetadata {
  double delta = 0.0;
  double alpha = 0.0;
  std::function<double(const Eigen::VectorXd& t)> beta;
  std::function<double(const Eigen::VectorXd& t)> gamma;
};

/// Evaluator bundle for H(t,u) on the phase space R^{n+np}. The Hessian must
/// be symmetric positive definite wherever it is queried (strict convexity);
/// conjugation fails loudly otherwise.
struct HamiltonianModel {
  int n = 0;
  int p = 0;
  std::function<double(const Eigen::VectorXd& t, const Eigen::VectorXd& u)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& t, const Eigen::VectorXd& u)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& t, const Eigen::VectorXd& u)> hessian;
  std::optional<GrowthMetadata> growth;

  int dim() const { return n * (1 + p); }
};

/// H(u) = 1/2 u^T A u + b.u with A symmetric positive definite.
HamiltonianModel make_quadratic_hamiltonian(int n, int p, Eigen::MatrixXd A, Eigen::VectorXd b);

HamiltonianModel make_quadratic_hamiltonian(int n, int p, Eigen::MatrixXd A);

/// H(t,u) = s(t)/2 u^T A u with s(t) > 0.
HamiltonianModel make_time_scaled_quadratic(int n, int p, Eigen::MatrixXd A,
                                            std::function<double(const Eigen::VectorXd&)> scale);

/// H(u) = a/4 |u|^4 + b/2 |u|^2 with a >= 0, b > 0. Radially convex with
/// superquadratic growth; exercises genuinely nonlinear conjugation.
HamiltonianModel make_quartic_radial(int n, int p, double a, double b);

}  // namespace dualact
