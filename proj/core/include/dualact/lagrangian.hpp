#pragma once

#include <Eigen/Core>
#include <functional>

namespace dualact {

/// Evaluator bundle for a first-order Lagrangian L(t, x, xdot) with x in R^n
/// and xdot in R^{n x p} (column a holds d x / d t^a). The velocity Hessian
/// uses the flattened index (i, a) -> i*p + a and must be invertible wherever
/// the Legendre transformation is queried.
struct LagrangianModel {
  int n = 0;
  int p = 0;
  bool autonomous = true;
  std::function<double(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                       const Eigen::MatrixXd& xdot)>
      value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::MatrixXd&)>
      grad_x;
  /// dL/d x^i_a as an n x p matrix.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::MatrixXd&)>
      grad_xdot;
  /// dL/d t^a; identically zero when autonomous.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::MatrixXd&)>
      grad_t;
  /// d^2 L / d x^i_a d x^k_b, (np) x (np) with rows/cols flattened (i,a).
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::MatrixXd&)>
      velocity_hessian;
};

/// L = 1/2 xdot^2 - 1/2 x^2 (p = 1, n = 1); Legendre partner H = (p^2+x^2)/2.
LagrangianModel make_harmonic_oscillator_lagrangian();

/// L = 1/2 sum_a (x_a)^2 - 1/2 x^2 (p = 2, n = 1); Euler-Lagrange equation is
/// the Helmholtz equation laplacian(x) = -x.
LagrangianModel make_helmholtz_lagrangian();

/// L = 1/2 sum_a (x_a)^2 (n = 1); Euler-Lagrange equation is laplacian(x) = 0.
/// Its Legendre partner has no x dependence and is not strictly convex, so
/// this family is for residual and conservation checks only.
LagrangianModel make_free_field_lagrangian(int p);

}  // namespace dualact
