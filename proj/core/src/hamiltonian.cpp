#include "dualact/hamiltonian.hpp"

#include <memory>
#include <stdexcept>

namespace dualact {

HamiltonianModel make_quadratic_hamiltonian(int n, int p, Eigen::MatrixXd A, Eigen::VectorXd b) {
  const int m = n * (1 + p);
  if (A.rows() != m || A.cols() != m) {
    throw std::invalid_argument("quadratic Hamiltonian matrix must be (n+np) x (n+np)");
  }
  if (b.size() != m) {
    throw std::invalid_argument("quadratic Hamiltonian offset must have n+np entries");
  }
  auto mat = std::make_shared<Eigen::MatrixXd>(0.5 * (A + A.transpose()));
  auto off = std::make_shared<Eigen::VectorXd>(std::move(b));

  HamiltonianModel model;
  model.n = n;
  model.p = p;
  model.value = [mat, off](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    return 0.5 * u.dot(*mat * u) + off->dot(u);
  };
  model.gradient = [mat, off](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    return Eigen::VectorXd(*mat * u + *off);
  };
  model.hessian = [mat](const Eigen::VectorXd&, const Eigen::VectorXd&) { return *mat; };
  return model;
}

HamiltonianModel make_quadratic_hamiltonian(int n, int p, Eigen::MatrixXd A) {
  const int m = n * (1 + p);
  return make_quadratic_hamiltonian(n, p, std::move(A), Eigen::VectorXd::Zero(m));
}

HamiltonianModel make_time_scaled_quadratic(int n, int p, Eigen::MatrixXd A,
                                            std::function<double(const Eigen::VectorXd&)> scale) {
  const int m = n * (1 + p);
  if (A.rows() != m || A.cols() != m) {
    throw std::invalid_argument("quadratic Hamiltonian matrix must be (n+np) x (n+np)");
  }
  auto mat = std::make_shared<Eigen::MatrixXd>(0.5 * (A + A.transpose()));
  auto s = std::make_shared<std::function<double(const Eigen::VectorXd&)>>(std::move(scale));

  HamiltonianModel model;
  model.n = n;
  model.p = p;
  model.value = [mat, s](const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
    return 0.5 * (*s)(t)*u.dot(*mat * u);
  };
  model.gradient = [mat, s](const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
    return Eigen::VectorXd((*s)(t) * (*mat * u));
  };
  model.hessian = [mat, s](const Eigen::VectorXd& t, const Eigen::VectorXd&) {
    return Eigen::MatrixXd((*s)(t) * (*mat));
  };
  return model;
}

HamiltonianModel make_quartic_radial(int n, int p, double a, double b) {
  if (a < 0.0 || b <= 0.0) {
    throw std::invalid_argument("quartic radial Hamiltonian needs a >= 0 and b > 0");
  }
  const int m = n * (1 + p);

  HamiltonianModel model;
  model.n = n;
  model.p = p;
  model.value = [a, b](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    const double r2 = u.squaredNorm();
    return 0.25 * a * r2 * r2 + 0.5 * b * r2;
  };
  model.gradient = [a, b](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    return Eigen::VectorXd((a * u.squaredNorm() + b) * u);
  };
  model.hessian = [a, b, m](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    Eigen::MatrixXd h = (a * u.squaredNorm() + b) * Eigen::MatrixXd::Identity(m, m);
    h += 2.0 * a * u * u.transpose();
    return h;
  };
  return model;
}

}  // namespace dualact
