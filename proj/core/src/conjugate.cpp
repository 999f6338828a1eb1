#include "dualact/conjugate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dualact/errors.hpp"

namespace dualact {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string point_string(const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
  std::ostringstream os;
  os << "t = (";
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    os << (i ? ", " : "") << t[i];
  }
  os << "), u = (";
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    os << (i ? ", " : "") << u[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

ConjugateResult conjugate(const HamiltonianModel& model, const Eigen::VectorXd& t,
                          const Eigen::VectorXd& v, const Eigen::VectorXd* guess,
                          const ConjugateOptions& opts) {
  const int m = model.dim();
  if (v.size() != m) {
    throw std::invalid_argument("conjugate: v must have n+np entries");
  }
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("conjugate: tol must be positive");
  }

  Eigen::VectorXd u = (guess && guess->size() == m) ? *guess : Eigen::VectorXd::Zero(m);

  // Maximize phi(u) = <u,v> - H(t,u); grad phi = v - grad H, concave by
  // strict convexity of H.
  auto phi = [&](const Eigen::VectorXd& point) { return point.dot(v) - model.value(t, point); };

  double phi_u = phi(u);
  Eigen::VectorXd residual = v - model.gradient(t, u);
  double res_norm = residual.norm();
  double best_res = res_norm;

  int iter = 0;
  for (; iter < opts.max_iters && res_norm > opts.tol; ++iter) {
    const Eigen::MatrixXd hess = model.hessian(t, u);
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) {
      throw ConvexityError("convexity violation: Hessian not positive definite at " +
                               point_string(t, u),
                           to_std(t), to_std(u));
    }
    const Eigen::VectorXd direction = llt.solve(residual);
    const double slope = residual.dot(direction);  // = d^T Hess d > 0

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd candidate = u + step * direction;
      const double phi_c = phi(candidate);
      if (phi_c >= phi_u + 1e-4 * step * slope) {
        u = candidate;
        phi_u = phi_c;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw ConvergenceError("no convergence: conjugation line search collapsed, best residual " +
                                 std::to_string(best_res),
                             best_res, iter);
    }
    residual = v - model.gradient(t, u);
    res_norm = residual.norm();
    best_res = std::min(best_res, res_norm);
  }

  if (res_norm > opts.tol) {
    throw ConvergenceError("no convergence: conjugation hit the iteration cap (" +
                               std::to_string(opts.max_iters) + "), best residual " +
                               std::to_string(best_res),
                           best_res, iter);
  }

  ConjugateResult result;
  result.value = phi_u;
  result.argmax = std::move(u);
  result.iterations = iter;
  result.residual = res_norm;
  return result;
}

Eigen::VectorXd grad_conjugate(const HamiltonianModel& model, const Eigen::VectorXd& t,
                               const Eigen::VectorXd& v, const Eigen::VectorXd* guess,
                               const ConjugateOptions& opts) {
  return conjugate(model, t, v, guess, opts).argmax;
}

GrowthReport check_growth_bounds(
    const HamiltonianModel& model,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples,
    const ConjugateOptions& opts) {
  if (!model.growth) {
    throw std::invalid_argument("check_growth_bounds: model carries no growth metadata");
  }
  const GrowthMetadata& g = *model.growth;

  GrowthReport report;
  report.checked = samples.size();

  for (const auto& [t, v] : samples) {
    const ConjugateResult conj = conjugate(model, t, v, nullptr, opts);
    const double lower = 0.5 / g.alpha * v.squaredNorm() - g.gamma(t);
    const double upper = 0.5 / g.delta * v.squaredNorm() + g.beta(t);
    // Small slack for the Newton residual; the bounds are exact for H* itself.
    const double slack = 1e-9 * (1.0 + std::abs(conj.value));
    if (conj.value < lower - slack || conj.value > upper + slack) {
      report.violations.push_back({t, v, lower, conj.value, upper});
    }
  }

  // Quadratic envelope identity, checked through the same inner maximization
  // on the pure quadratic (spot check on a handful of samples).
  {
    const int m = model.dim();
    const Eigen::VectorXd t0 = Eigen::VectorXd::Zero(model.p);
    const double gamma0 = g.gamma(t0);
    HamiltonianModel envelope = make_quadratic_hamiltonian(
        model.n, model.p, g.alpha * Eigen::MatrixXd::Identity(m, m));
    double worst = 0.0;
    const std::size_t spot = std::min<std::size_t>(samples.size(), 16);
    for (std::size_t s = 0; s < spot; ++s) {
      const Eigen::VectorXd& v = samples[s].second;
      const double numeric = conjugate(envelope, t0, v, nullptr, opts).value - gamma0;
      const double closed = 0.5 / g.alpha * v.squaredNorm() - gamma0;
      worst = std::max(worst, std::abs(numeric - closed));
    }
    report.envelope_error = worst;
  }

  report.passed = report.violations.empty();
  return report;
}

GradientBoundReport check_gradient_bound(
    const HamiltonianModel& model,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples, double c1, double c2,
    const ConjugateOptions& opts) {
  if (!model.growth) {
    throw std::invalid_argument("check_gradient_bound: model carries no growth metadata");
  }
  const GrowthMetadata& g = *model.growth;

  GradientBoundReport report;
  report.checked = samples.size();
  report.c1 = c1;
  report.c2 = c2;

  // Least-squares fit of |grad H*| ~ C1 |v| + C2 (beta+gamma+1) for the
  // documentation side of the report.
  struct Row {
    double a, b, norm;
  };
  std::vector<Row> rows;
  rows.reserve(samples.size());
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;

  for (const auto& [t, v] : samples) {
    const Eigen::VectorXd u = grad_conjugate(model, t, v, nullptr, opts);
    const double norm = u.norm();
    const double a = v.norm();
    const double b = g.beta(t) + g.gamma(t) + 1.0;
    const double bound = c1 * a + c2 * b;
    if (norm > bound + 1e-9 * (1.0 + bound)) {
      report.violations.push_back({t, v, norm, bound});
    }
    rows.push_back({a, b, norm});
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    r1 += a * norm;
    r2 += b * norm;
  }

  const double det = s11 * s22 - s12 * s12;
  double f1 = 0.0, f2 = 0.0;
  if (std::abs(det) > 1e-14 * (s11 + s22) * (s11 + s22)) {
    f1 = (s22 * r1 - s12 * r2) / det;
    f2 = (s11 * r2 - s12 * r1) / det;
  } else if (s11 > 0.0) {
    f1 = r1 / s11;
  }
  f1 = std::max(f1, 0.0);
  f2 = std::max(f2, 0.0);

  // Scale the fit up until it is feasible on every sample.
  double scale = 1.0;
  for (const Row& row : rows) {
    const double denom = f1 * row.a + f2 * row.b;
    if (denom > 0.0) {
      scale = std::max(scale, row.norm / denom);
    }
  }
  report.fitted_c1 = f1 * scale;
  report.fitted_c2 = f2 * scale;

  report.passed = report.violations.empty();
  return report;
}

}  // namespace dualact
