#pragma once

#include <Eigen/Core>

#include "dualact/derivative.hpp"
#include "dualact/field.hpp"
#include "dualact/hamiltonian.hpp"
#include "dualact/lagrangian.hpp"

namespace dualact {

/// Momenta p_k^a = dL/d x^k_a and H = p : xdot - L at one point.
struct LegendrePoint {
  Eigen::MatrixXd momenta;  // n x p
  double hamiltonian = 0.0;
};

LegendrePoint legendre_transform(const LagrangianModel& L, const Eigen::VectorXd& t,
                                 const Eigen::VectorXd& x, const Eigen::MatrixXd& xdot);

/// Inverse of the velocity-to-momentum map by Newton on dL/dxdot = momenta.
/// Throws DegenerateLagrangianError when the velocity Hessian is singular.
Eigen::MatrixXd invert_legendre(const LagrangianModel& L, const Eigen::VectorXd& t,
                                const Eigen::VectorXd& x, const Eigen::MatrixXd& momenta,
                                const Eigen::MatrixXd* guess = nullptr, double tol = 1e-12,
                                int max_iters = 50);

/// Hamiltonian evaluator H(t, x, p) = p : xdot(t,x,p) - L(t, x, xdot(t,x,p))
/// built on the implicit velocity inversion. Value and gradient are exact
/// (grad_x H = -grad_x L, grad_p H = xdot); the Hessian falls back to central
/// differences of the gradient and is only needed if the model is conjugated.
HamiltonianModel hamiltonian_from_lagrangian(const LagrangianModel& L);

/// Trajectories are position-only periodic fields with n components;
/// velocities and momenta are always derived with the configured scheme so
/// every residual is consistent with one discretization.

/// Node-wise D_a[dL/dx^i_a] - dL/dx^i along the trajectory (n components).
PeriodicField euler_lagrange_residual(const LagrangianModel& L, const PeriodicField& trajectory,
                                      DerivativeScheme scheme);

/// Phase field u = (x, p) with momenta from the Legendre transformation along
/// the trajectory.
PeriodicField phase_field_from_trajectory(const LagrangianModel& L,
                                          const PeriodicField& trajectory,
                                          DerivativeScheme scheme);

struct EquivalenceReport {
  double el_l2 = 0.0;
  double el_sup = 0.0;
  double hamilton_l2 = 0.0;
  double hamilton_sup = 0.0;
  double ratio = 0.0;  // hamilton_l2 / el_l2
};

/// Euler-Lagrange residual of the trajectory versus the Hamilton residual of
/// the phase field it induces; on solutions both vanish together under
/// refinement.
EquivalenceReport hamilton_equivalence_check(const LagrangianModel& L,
                                             const PeriodicField& trajectory,
                                             DerivativeScheme scheme);

struct FirstIntegralReport {
  double h0 = 0.0;        // H at the first node
  double max_drift = 0.0; // max |H(t) - H(0)| along the trajectory
};

/// Single-time (p = 1) first-integral monitor for autonomous Lagrangians.
FirstIntegralReport first_integral_check(const LagrangianModel& L,
                                         const PeriodicField& trajectory,
                                         DerivativeScheme scheme);

/// Energy-moment tensor T^a_b = x^i_b dL/dx^i_a - delta^a_b L per node,
/// stored with p*p components, component index a*p + b.
PeriodicField energy_moment_tensor(const LagrangianModel& L, const PeriodicField& trajectory,
                                   DerivativeScheme scheme);

struct DivergenceReport {
  double sup = 0.0;
  double l2 = 0.0;
};

/// Norms of d/dt^a T^a_b + dL/dt^b (p components per node); zero on solutions
/// of autonomous Lagrangians up to discretization error.
DivergenceReport divergence_check(const LagrangianModel& L, const PeriodicField& trajectory,
                                  DerivativeScheme scheme);

}  // namespace dualact
