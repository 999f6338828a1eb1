#include "dualact/lagrangian.hpp"

namespace dualact {

LagrangianModel make_harmonic_oscillator_lagrangian() {
  LagrangianModel model;
  model.n = 1;
  model.p = 1;
  model.autonomous = true;
  model.value = [](const Eigen::VectorXd&, const Eigen::VectorXd& x, const Eigen::MatrixXd& xd) {
    return 0.5 * xd(0, 0) * xd(0, 0) - 0.5 * x[0] * x[0];
  };
  model.grad_x = [](const Eigen::VectorXd&, const Eigen::VectorXd& x, const Eigen::MatrixXd&) {
    return Eigen::VectorXd::Constant(1, -x[0]);
  };
  model.grad_xdot = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::MatrixXd& xd) {
    return Eigen::MatrixXd(xd);
  };
  model.grad_t = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::MatrixXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  model.velocity_hessian = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                              const Eigen::MatrixXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  return model;
}

namespace {

// Shared body for the quadratic-velocity families L = 1/2 sum_a (x_a)^2 + c/2 x^2.
LagrangianModel quadratic_velocity_lagrangian(int p, double x_coefficient) {
  LagrangianModel model;
  model.n = 1;
  model.p = p;
  model.autonomous = true;
  model.value = [x_coefficient](const Eigen::VectorXd&, const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& xd) {
    return 0.5 * xd.row(0).squaredNorm() + 0.5 * x_coefficient * x[0] * x[0];
  };
  model.grad_x = [x_coefficient](const Eigen::VectorXd&, const Eigen::VectorXd& x,
                                 const Eigen::MatrixXd&) {
    return Eigen::VectorXd::Constant(1, x_coefficient * x[0]);
  };
  model.grad_xdot = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::MatrixXd& xd) {
    return Eigen::MatrixXd(xd);
  };
  model.grad_t = [p](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::MatrixXd&) {
    return Eigen::VectorXd::Zero(p);
  };
  model.velocity_hessian = [p](const Eigen::VectorXd&, const Eigen::VectorXd&,
                               const Eigen::MatrixXd&) {
    return Eigen::MatrixXd::Identity(p, p);
  };
  return model;
}

}  // namespace

LagrangianModel make_helmholtz_lagrangian() { return quadratic_velocity_lagrangian(2, -1.0); }

LagrangianModel make_free_field_lagrangian(int p) {
  return quadratic_velocity_lagrangian(p, 0.0);
}

}  // namespace dualact
