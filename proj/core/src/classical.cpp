#include "dualact/classical.hpp"

#include <Eigen/LU>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "dualact/action.hpp"
#include "dualact/errors.hpp"
#include "dualact/solver.hpp"
#include "kahan.hpp"

namespace dualact {
namespace {

Eigen::VectorXd node_time(const MultiTimeGrid& grid, std::size_t node) {
  Eigen::VectorXd t(grid.dims());
  for (int a = 0; a < grid.dims(); ++a) {
    t[a] = static_cast<double>(grid.coordinate(node, a)) * grid.spacing(a);
  }
  return t;
}

Eigen::VectorXd node_positions(const PeriodicField& traj, std::size_t node) {
  const auto values = traj.node(node);
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

// d x / d t as an n x p matrix from the field Jacobian.
Eigen::MatrixXd node_velocities(const FieldJacobian& jac, std::size_t node, int n, int p) {
  Eigen::MatrixXd xd(n, p);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < p; ++a) {
      xd(i, a) = jac.at(node, i, a);
    }
  }
  return xd;
}

void check_trajectory(const LagrangianModel& L, const PeriodicField& traj) {
  if (traj.components() != L.n) {
    throw std::invalid_argument("trajectory must have n components (positions only)");
  }
  if (traj.grid().dims() != L.p) {
    throw std::invalid_argument("trajectory grid dimension does not match the Lagrangian");
  }
}

}  // namespace

LegendrePoint legendre_transform(const LagrangianModel& L, const Eigen::VectorXd& t,
                                 const Eigen::VectorXd& x, const Eigen::MatrixXd& xdot) {
  LegendrePoint out;
  out.momenta = L.grad_xdot(t, x, xdot);
  out.hamiltonian = out.momenta.cwiseProduct(xdot).sum() - L.value(t, x, xdot);
  return out;
}

Eigen::MatrixXd invert_legendre(const LagrangianModel& L, const Eigen::VectorXd& t,
                                const Eigen::VectorXd& x, const Eigen::MatrixXd& momenta,
                                const Eigen::MatrixXd* guess, double tol, int max_iters) {
  const int n = L.n;
  const int p = L.p;
  Eigen::MatrixXd xdot = guess ? *guess : Eigen::MatrixXd::Zero(n, p);

  double best = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::MatrixXd residual = L.grad_xdot(t, x, xdot) - momenta;
    const double norm = residual.norm();
    best = std::min(best, norm);
    if (norm <= tol * (1.0 + momenta.norm())) {
      return xdot;
    }
    const Eigen::MatrixXd hess = L.velocity_hessian(t, x, xdot);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
    if (!lu.isInvertible()) {
      throw DegenerateLagrangianError(
          "degenerate Lagrangian: velocity Hessian is singular at the queried point");
    }
    Eigen::VectorXd flat(n * p);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < p; ++a) {
        flat[i * p + a] = residual(i, a);
      }
    }
    const Eigen::VectorXd step = lu.solve(flat);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < p; ++a) {
        xdot(i, a) -= step[i * p + a];
      }
    }
  }
  throw ConvergenceError("no convergence inverting the Legendre transformation", best, max_iters);
}

HamiltonianModel hamiltonian_from_lagrangian(const LagrangianModel& L) {
  const int n = L.n;
  const int p = L.p;
  const int m = phase_components(n, p);
  auto lag = std::make_shared<LagrangianModel>(L);

  auto split = [n, p](const Eigen::VectorXd& u) {
    Eigen::VectorXd x = u.head(n);
    Eigen::MatrixXd mom(n, p);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < p; ++a) {
        mom(i, a) = u[momentum_component(n, p, i, a)];
      }
    }
    return std::make_pair(std::move(x), std::move(mom));
  };

  HamiltonianModel model;
  model.n = n;
  model.p = p;
  model.value = [lag, split](const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
    const auto [x, mom] = split(u);
    const Eigen::MatrixXd xd = invert_legendre(*lag, t, x, mom);
    return mom.cwiseProduct(xd).sum() - lag->value(t, x, xd);
  };
  model.gradient = [lag, split, n, p, m](const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
    const auto [x, mom] = split(u);
    const Eigen::MatrixXd xd = invert_legendre(*lag, t, x, mom);
    Eigen::VectorXd grad(m);
    grad.head(n) = -lag->grad_x(t, x, xd);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < p; ++a) {
        grad[momentum_component(n, p, i, a)] = xd(i, a);
      }
    }
    return grad;
  };
  auto gradient = model.gradient;
  model.hessian = [gradient, m](const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
    Eigen::MatrixXd hess(m, m);
    const double step = 1e-6 * (1.0 + u.norm());
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd up = u, dn = u;
      up[j] += step;
      dn[j] -= step;
      hess.col(j) = (gradient(t, up) - gradient(t, dn)) / (2.0 * step);
    }
    return Eigen::MatrixXd(0.5 * (hess + hess.transpose()));
  };
  return model;
}

PeriodicField euler_lagrange_residual(const LagrangianModel& L, const PeriodicField& traj,
                                      DerivativeScheme scheme) {
  check_trajectory(L, traj);
  const MultiTimeGrid& grid = traj.grid();
  const int n = L.n;
  const int p = L.p;
  const std::size_t nodes = grid.node_count();

  const FieldJacobian jac = derivative(traj, scheme);

  // dL/dx^i_a along the trajectory, stored as an np-component field (i,a).
  PeriodicField momenta_field(grid, n * p);
  PeriodicField grad_x_field(grid, n);
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, n, p);
    const Eigen::MatrixXd mom = L.grad_xdot(t, x, xd);
    const Eigen::VectorXd gx = L.grad_x(t, x, xd);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < p; ++a) {
        momenta_field.at(node, i * p + a) = mom(i, a);
      }
      grad_x_field.at(node, i) = gx[i];
    }
  }

  const FieldJacobian momenta_jac = derivative(momenta_field, scheme);
  PeriodicField residual(grid, n);
  for (std::size_t node = 0; node < nodes; ++node) {
    for (int i = 0; i < n; ++i) {
      double div = 0.0;
      for (int a = 0; a < p; ++a) {
        div += momenta_jac.at(node, i * p + a, a);
      }
      residual.at(node, i) = div - grad_x_field.at(node, i);
    }
  }
  return residual;
}

PeriodicField phase_field_from_trajectory(const LagrangianModel& L, const PeriodicField& traj,
                                          DerivativeScheme scheme) {
  check_trajectory(L, traj);
  const MultiTimeGrid& grid = traj.grid();
  const int n = L.n;
  const int p = L.p;
  const std::size_t nodes = grid.node_count();
  const FieldJacobian jac = derivative(traj, scheme);

  PeriodicField u = PeriodicField::phase(grid, n);
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, n, p);
    const Eigen::MatrixXd mom = L.grad_xdot(t, x, xd);
    for (int i = 0; i < n; ++i) {
      u.at(node, x_component(i)) = x[i];
      for (int a = 0; a < p; ++a) {
        u.at(node, momentum_component(n, p, i, a)) = mom(i, a);
      }
    }
  }
  return u;
}

EquivalenceReport hamilton_equivalence_check(const LagrangianModel& L,
                                             const PeriodicField& traj,
                                             DerivativeScheme scheme) {
  const PeriodicField el = euler_lagrange_residual(L, traj, scheme);
  const PeriodicField u = phase_field_from_trajectory(L, traj, scheme);

  ActionProblem prob{traj.grid(), hamiltonian_from_lagrangian(L), scheme, {}, 1};
  const HamiltonResidual hres = verify_hamilton(prob, u);

  EquivalenceReport report;
  report.el_l2 = grid_l2_norm(el);
  report.el_sup = sup_norm(el);
  report.hamilton_l2 = hres.l2;
  report.hamilton_sup = hres.sup;
  report.ratio = (report.el_l2 > 0.0) ? report.hamilton_l2 / report.el_l2 : 0.0;
  return report;
}

FirstIntegralReport first_integral_check(const LagrangianModel& L, const PeriodicField& traj,
                                         DerivativeScheme scheme) {
  check_trajectory(L, traj);
  if (L.p != 1) {
    throw std::invalid_argument("first_integral_check needs a single-time Lagrangian (p = 1)");
  }
  if (!L.autonomous) {
    throw std::invalid_argument("first_integral_check needs an autonomous Lagrangian");
  }
  const MultiTimeGrid& grid = traj.grid();
  const std::size_t nodes = grid.node_count();
  const FieldJacobian jac = derivative(traj, scheme);

  // Spot check the autonomous flag against dL/dt at a couple of nodes.
  for (std::size_t node : {std::size_t{0}, nodes / 2}) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, L.n, 1);
    if (L.grad_t(t, x, xd).norm() > 1e-12 * (1.0 + std::abs(L.value(t, x, xd)))) {
      throw std::invalid_argument("Lagrangian flagged autonomous but dL/dt is nonzero");
    }
  }

  FirstIntegralReport report;
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, L.n, 1);
    const double h = legendre_transform(L, t, x, xd).hamiltonian;
    if (node == 0) {
      report.h0 = h;
    }
    report.max_drift = std::max(report.max_drift, std::abs(h - report.h0));
  }
  return report;
}

PeriodicField energy_moment_tensor(const LagrangianModel& L, const PeriodicField& traj,
                                   DerivativeScheme scheme) {
  check_trajectory(L, traj);
  const MultiTimeGrid& grid = traj.grid();
  const int n = L.n;
  const int p = L.p;
  const std::size_t nodes = grid.node_count();
  const FieldJacobian jac = derivative(traj, scheme);

  PeriodicField tensor(grid, p * p);
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, n, p);
    const Eigen::MatrixXd mom = L.grad_xdot(t, x, xd);
    const double lval = L.value(t, x, xd);
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          sum += xd(i, b) * mom(i, a);
        }
        tensor.at(node, a * p + b) = sum - (a == b ? lval : 0.0);
      }
    }
  }
  return tensor;
}

DivergenceReport divergence_check(const LagrangianModel& L, const PeriodicField& traj,
                                  DerivativeScheme scheme) {
  const MultiTimeGrid& grid = traj.grid();
  const int p = L.p;
  const std::size_t nodes = grid.node_count();

  const PeriodicField tensor = energy_moment_tensor(L, traj, scheme);
  const FieldJacobian tensor_jac = derivative(tensor, scheme);
  const FieldJacobian jac = derivative(traj, scheme);

  PeriodicField violation(grid, p);
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(grid, node);
    const Eigen::VectorXd x = node_positions(traj, node);
    const Eigen::MatrixXd xd = node_velocities(jac, node, L.n, p);
    const Eigen::VectorXd gt = L.grad_t(t, x, xd);
    for (int b = 0; b < p; ++b) {
      double div = 0.0;
      for (int a = 0; a < p; ++a) {
        div += tensor_jac.at(node, a * p + b, a);
      }
      violation.at(node, b) = div + gt[b];
    }
  }
  return {sup_norm(violation), grid_l2_norm(violation)};
}

}  // namespace dualact
