#include "dualact/solver.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>
#include <deque>
#include <mutex>
#include <random>
#include <stdexcept>

#include "dualact/errors.hpp"
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

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Symbol of the scheme's derivative along `axis` at integer frequency index
// k in [0, N): i * omega_tilde with the returned real omega_tilde. Both
// schemes are diagonal in the discrete Fourier basis (circulant stencils).
double derivative_symbol(const MultiTimeGrid& grid, int axis, std::size_t k,
                         DerivativeScheme scheme) {
  const std::size_t n = grid.resolution(axis);
  if (scheme == DerivativeScheme::Central2) {
    return std::sin(2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n)) /
           grid.spacing(axis);
  }
  if (2 * k == n) {
    return 0.0;  // zeroed Nyquist bin
  }
  const long signed_k =
      (k <= n / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
  return 2.0 * M_PI * static_cast<double>(signed_k) / grid.period(axis);
}

// Dense per-node inverse Hessians of H at the recovered field; applied when
// forming Hessian-vector products of the dual action.
struct NodeFactors {
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt;
};

NodeFactors factor_hessians(const ActionProblem& prob, const PeriodicField& w) {
  const std::size_t nodes = prob.grid.node_count();
  NodeFactors factors;
  factors.llt.reserve(nodes);
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(prob.grid, node);
    const auto values = w.node(node);
    const Eigen::VectorXd u =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    Eigen::LLT<Eigen::MatrixXd> llt(prob.hamiltonian.hessian(t, u));
    if (llt.info() != Eigen::Success) {
      throw ConvexityError("convexity violation while factoring the recovered field Hessian",
                           std::vector<double>(t.data(), t.data() + t.size()),
                           std::vector<double>(u.data(), u.data() + u.size()));
    }
    factors.llt.push_back(std::move(llt));
  }
  return factors;
}

// Exact Hessian-vector product of the dual action at the linearization point
// that produced `factors`:
//   J d = cellvol * B( d + HessH(w)^{-1} B d ),  B = polysymplectic o derivative.
PeriodicField apply_phi_hessian(const ActionProblem& prob, const NodeFactors& factors,
                                const PeriodicField& d) {
  const int n = prob.hamiltonian.n;
  PeriodicField bd = poly_derivative(d, n, prob.scheme);
  const std::size_t nodes = prob.grid.node_count();
  PeriodicField inner = d;
  for (std::size_t node = 0; node < nodes; ++node) {
    const auto bval = bd.node(node);
    const Eigen::VectorXd rhs =
        Eigen::Map<const Eigen::VectorXd>(bval.data(), static_cast<Eigen::Index>(bval.size()));
    const Eigen::VectorXd solved = factors.llt[node].solve(rhs);
    auto out = inner.node(node);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += solved[static_cast<Eigen::Index>(k)];
    }
  }
  PeriodicField result = poly_derivative(inner, n, prob.scheme);
  scale_in_place(result, prob.grid.cell_volume());
  return result;
}

struct OptimizerState {
  PeriodicField v;
  PhiEvaluation eval;
  std::vector<HistoryEntry> history;
  int iterations = 0;
  bool converged = false;
};

void record(OptimizerState& state, const SolveConfig& cfg) {
  state.history.push_back({state.iterations, state.eval.value, sup_norm(state.eval.gradient)});
  if (cfg.on_iterate) {
    cfg.on_iterate(state.iterations, state.v);
  }
}

void run_gradient_descent(const ActionProblem& prob, const SolveConfig& cfg,
                          OptimizerState& state) {
  double step = 1.0;
  while (state.iterations < cfg.max_iters &&
         sup_norm(state.eval.gradient) > cfg.grad_tol) {
    const double g2 = field_dot(state.eval.gradient, state.eval.gradient);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      PeriodicField candidate = state.v;
      axpy_in_place(-step, state.eval.gradient, candidate);
      subtract_mean_in_place(candidate);
      PhiEvaluation trial = eval_phi_full(prob, candidate, &state.eval.w);
      if (trial.value <= state.eval.value - 1e-4 * step * g2) {
        state.v = std::move(candidate);
        state.eval = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      return;  // line search collapsed; best iterate stands
    }
    ++state.iterations;
    record(state, cfg);
    step = std::min(step * 2.0, 1e6);
  }
  state.converged = sup_norm(state.eval.gradient) <= cfg.grad_tol;
}

void run_lbfgs(const ActionProblem& prob, const SolveConfig& cfg, OptimizerState& state) {
  struct Pair {
    PeriodicField s, y;
    double rho;
  };
  std::deque<Pair> memory;

  while (state.iterations < cfg.max_iters &&
         sup_norm(state.eval.gradient) > cfg.grad_tol) {
    // Two-loop recursion.
    PeriodicField direction = state.eval.gradient;
    std::vector<double> alpha(memory.size(), 0.0);
    for (std::size_t i = memory.size(); i-- > 0;) {
      alpha[i] = memory[i].rho * field_dot(memory[i].s, direction);
      axpy_in_place(-alpha[i], memory[i].y, direction);
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const double yy = field_dot(last.y, last.y);
      if (yy > 0.0) {
        scale_in_place(direction, field_dot(last.s, last.y) / yy);
      }
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const double beta = memory[i].rho * field_dot(memory[i].y, direction);
      axpy_in_place(alpha[i] - beta, memory[i].s, direction);
    }
    scale_in_place(direction, -1.0);

    double slope = field_dot(state.eval.gradient, direction);
    if (slope >= 0.0) {
      // Not a descent direction; drop the memory and fall back to steepest.
      memory.clear();
      direction = state.eval.gradient;
      scale_in_place(direction, -1.0);
      slope = -field_dot(state.eval.gradient, state.eval.gradient);
    }

    double step = 1.0;
    bool accepted = false;
    PeriodicField prev_v = state.v;
    PeriodicField prev_g = state.eval.gradient;
    for (int bt = 0; bt < 60; ++bt) {
      PeriodicField candidate = state.v;
      axpy_in_place(step, direction, candidate);
      subtract_mean_in_place(candidate);
      PhiEvaluation trial = eval_phi_full(prob, candidate, &state.eval.w);
      if (trial.value <= state.eval.value + 1e-4 * step * slope) {
        state.v = std::move(candidate);
        state.eval = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      return;
    }
    ++state.iterations;
    record(state, cfg);

    PeriodicField s = state.v;
    axpy_in_place(-1.0, prev_v, s);
    PeriodicField y = state.eval.gradient;
    axpy_in_place(-1.0, prev_g, y);
    const double sy = field_dot(s, y);
    if (sy > 1e-12 * std::sqrt(field_dot(s, s)) * std::sqrt(field_dot(y, y))) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      while (memory.size() > static_cast<std::size_t>(std::max(cfg.lbfgs_memory, 1))) {
        memory.pop_front();
      }
    }
  }
  state.converged = sup_norm(state.eval.gradient) <= cfg.grad_tol;
}

// Gauss-Newton on 1/2 |grad Phi|^2: each step solves J^2 d = -J g by CG
// (J is the exact symmetric Hessian of Phi at the current iterate), then
// backtracks on the squared gradient norm. Finds saddle critical points.
void run_newton_krylov(const ActionProblem& prob, const SolveConfig& cfg,
                       OptimizerState& state) {
  while (state.iterations < cfg.max_iters &&
         sup_norm(state.eval.gradient) > cfg.grad_tol) {
    const NodeFactors factors = factor_hessians(prob, state.eval.w);
    const PeriodicField& g = state.eval.gradient;
    const PeriodicField jg = apply_phi_hessian(prob, factors, g);

    // CG on J^2 d = -J g.
    PeriodicField d(prob.grid, g.components());
    PeriodicField r = jg;
    scale_in_place(r, -1.0);
    PeriodicField q = r;
    double rr = field_dot(r, r);
    const double target = cfg.newton_inner_tol * std::sqrt(rr);
    for (int inner = 0; inner < cfg.newton_max_inner && std::sqrt(rr) > target; ++inner) {
      const PeriodicField jq = apply_phi_hessian(prob, factors, q);
      const PeriodicField j2q = apply_phi_hessian(prob, factors, jq);
      const double qa = field_dot(q, j2q);
      if (!(qa > 0.0)) {
        break;  // singular direction exhausted
      }
      const double step = rr / qa;
      axpy_in_place(step, q, d);
      axpy_in_place(-step, j2q, r);
      const double rr_new = field_dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      PeriodicField q_next = r;
      axpy_in_place(beta, q, q_next);
      q = std::move(q_next);
    }

    const double omega = 0.5 * field_dot(g, g);
    const double slope = field_dot(jg, d);  // directional derivative of omega
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      PeriodicField candidate = state.v;
      axpy_in_place(step, d, candidate);
      subtract_mean_in_place(candidate);
      PhiEvaluation trial = eval_phi_full(prob, candidate, &state.eval.w);
      const double omega_trial = 0.5 * field_dot(trial.gradient, trial.gradient);
      const bool armijo = (slope < 0.0)
                              ? omega_trial <= omega + 1e-4 * step * slope
                              : omega_trial < omega;
      if (armijo) {
        state.v = std::move(candidate);
        state.eval = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      return;
    }
    ++state.iterations;
    record(state, cfg);
  }
  state.converged = sup_norm(state.eval.gradient) <= cfg.grad_tol;
}

}  // namespace

PeriodicField random_smooth_field(const MultiTimeGrid& grid, int components, int kmax,
                                  double amplitude, std::uint64_t seed) {
  if (kmax < 1) {
    throw std::invalid_argument("random_smooth_field: kmax must be >= 1");
  }
  for (int a = 0; a < grid.dims(); ++a) {
    if (static_cast<std::size_t>(2 * kmax) >= grid.resolution(a)) {
      throw std::invalid_argument("random_smooth_field: kmax must stay below the Nyquist limit");
    }
  }
  const int p = grid.dims();

  // Canonical half of the mode lattice: first nonzero entry positive.
  std::vector<std::vector<long>> modes;
  std::vector<long> k(static_cast<std::size_t>(p), -static_cast<long>(kmax));
  for (;;) {
    bool keep = false;
    for (long ka : k) {
      if (ka != 0) {
        keep = ka > 0;
        break;
      }
    }
    if (keep) {
      modes.push_back(k);
    }
    int a = p - 1;
    for (; a >= 0; --a) {
      if (++k[static_cast<std::size_t>(a)] <= kmax) {
        break;
      }
      k[static_cast<std::size_t>(a)] = -static_cast<long>(kmax);
    }
    if (a < 0) {
      break;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = amplitude / std::sqrt(static_cast<double>(modes.size()));

  PeriodicField field(grid, components);
  const std::size_t nodes = grid.node_count();
  std::vector<double> phase(nodes);
  for (const auto& mode : modes) {
    for (std::size_t node = 0; node < nodes; ++node) {
      double s = 0.0;
      for (int a = 0; a < p; ++a) {
        s += 2.0 * M_PI * static_cast<double>(mode[static_cast<std::size_t>(a)]) *
             static_cast<double>(grid.coordinate(node, a)) /
             static_cast<double>(grid.resolution(a));
      }
      phase[node] = s;
    }
    for (int c = 0; c < components; ++c) {
      const double ca = sigma * gauss(rng);
      const double sa = sigma * gauss(rng);
      for (std::size_t node = 0; node < nodes; ++node) {
        field.at(node, c) += ca * std::cos(phase[node]) + sa * std::sin(phase[node]);
      }
    }
  }
  return field;
}

PeriodicField project_to_gradient_range(const PeriodicField& v, int n, DerivativeScheme scheme) {
  const MultiTimeGrid& grid = v.grid();
  const int p = grid.dims();
  const int m = v.components();
  if (m != phase_components(n, p)) {
    throw std::invalid_argument("project_to_gradient_range: not a phase field");
  }
  const std::size_t nodes = grid.node_count();

  // Full complex DFT of every component (both schemes are circulant, so B is
  // block-diagonal over modes and the projection is per-mode surgery).
  std::vector<int> dims(static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a) {
    dims[static_cast<std::size_t>(a)] = static_cast<int>(grid.resolution(a));
  }

  fftw_complex* buf = nullptr;
  fftw_plan fwd{}, inv{};
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    buf = fftw_alloc_complex(nodes);
    fwd = fftw_plan_dft(p, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft(p, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  std::vector<std::complex<double>> spectra(nodes * static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    for (std::size_t node = 0; node < nodes; ++node) {
      buf[node][0] = v.at(node, c);
      buf[node][1] = 0.0;
    }
    fftw_execute(fwd);
    for (std::size_t node = 0; node < nodes; ++node) {
      spectra[node * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] =
          std::complex<double>(buf[node][0], buf[node][1]);
    }
  }

  std::vector<double> omega(static_cast<std::size_t>(p));
  for (std::size_t mode = 0; mode < nodes; ++mode) {
    double norm2 = 0.0;
    for (int a = 0; a < p; ++a) {
      omega[static_cast<std::size_t>(a)] =
          derivative_symbol(grid, a, grid.coordinate(mode, a), scheme);
      norm2 += omega[static_cast<std::size_t>(a)] * omega[static_cast<std::size_t>(a)];
    }
    std::complex<double>* at = &spectra[mode * static_cast<std::size_t>(m)];
    if (norm2 == 0.0) {
      for (int c = 0; c < m; ++c) {
        at[c] = 0.0;
      }
      continue;
    }
    for (int i = 0; i < n; ++i) {
      // Momenta of state i: keep only the along-omega part.
      std::complex<double> proj(0.0, 0.0);
      for (int a = 0; a < p; ++a) {
        proj += omega[static_cast<std::size_t>(a)] * at[momentum_component(n, p, i, a)];
      }
      proj /= norm2;
      for (int a = 0; a < p; ++a) {
        at[momentum_component(n, p, i, a)] = omega[static_cast<std::size_t>(a)] * proj;
      }
    }
  }

  PeriodicField out(grid, m);
  const double scale = 1.0 / static_cast<double>(nodes);
  for (int c = 0; c < m; ++c) {
    for (std::size_t node = 0; node < nodes; ++node) {
      const std::complex<double>& z =
          spectra[node * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
      buf[node][0] = z.real();
      buf[node][1] = z.imag();
    }
    fftw_execute(inv);
    for (std::size_t node = 0; node < nodes; ++node) {
      out.at(node, c) = buf[node][0] * scale;
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf);
  }
  return out;
}

PeriodicField recover_w(const ActionProblem& prob, const PeriodicField& v) {
  prob.validate();
  const PeriodicField vstar = poly_derivative(v, prob.hamiltonian.n, prob.scheme);
  return conjugate_sweep(prob, vstar, nullptr, nullptr);
}

HamiltonResidual verify_hamilton(const ActionProblem& prob, const PeriodicField& w) {
  prob.validate();
  const int n = prob.hamiltonian.n;
  if (w.components() != phase_components(n, prob.grid.dims())) {
    throw std::invalid_argument("verify_hamilton: field is not a phase field for this problem");
  }
  PeriodicField residual = poly_derivative(w, n, prob.scheme);
  const std::size_t nodes = prob.grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    const Eigen::VectorXd t = node_time(prob.grid, node);
    const auto values = w.node(node);
    const Eigen::VectorXd u =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd grad = prob.hamiltonian.gradient(t, u);
    auto r = residual.node(node);
    for (std::size_t k = 0; k < r.size(); ++k) {
      r[k] += grad[static_cast<Eigen::Index>(k)];
    }
  }
  return {grid_l2_norm(residual), sup_norm(residual)};
}

MeanShiftReport mean_shift_check(const PeriodicField& v, const PeriodicField& w, double tol) {
  if (v.size() != w.size()) {
    throw std::invalid_argument("mean_shift_check: mismatched fields");
  }
  MeanShiftReport report;
  report.c = field_mean(w);
  report.tol = tol;
  const std::size_t nodes = v.grid().node_count();
  const int m = v.components();
  for (std::size_t node = 0; node < nodes; ++node) {
    double err = 0.0;
    for (int c = 0; c < m; ++c) {
      err = std::max(err, std::abs(v.at(node, c) + w.at(node, c) - report.c[c]));
    }
    if (err > report.max_error) {
      report.max_error = err;
      report.argmax_node = node;
    }
  }
  report.passed = report.max_error <= tol;
  return report;
}

SolveReport solve_periodic(const ActionProblem& prob, const SolveConfig& cfg) {
  prob.validate();
  if (!(cfg.grad_tol > 0.0)) {
    throw std::invalid_argument("solve config: grad_tol must be positive");
  }
  if (cfg.max_iters < 0) {
    throw std::invalid_argument("solve config: max_iters must be nonnegative");
  }
  const int n = prob.hamiltonian.n;
  const int m = phase_components(n, prob.grid.dims());

  PeriodicField init = [&]() {
    switch (cfg.init) {
      case InitKind::Zero:
        return PeriodicField(prob.grid, m);
      case InitKind::RandomSmooth:
        return random_smooth_field(prob.grid, m, cfg.init_kmax, cfg.init_amplitude, cfg.seed);
      case InitKind::Supplied:
        if (!cfg.supplied_init || cfg.supplied_init->components() != m ||
            !(cfg.supplied_init->grid() == prob.grid)) {
          throw std::invalid_argument("solve config: supplied init missing or mismatched");
        }
        return *cfg.supplied_init;
    }
    throw std::invalid_argument("solve config: unknown init kind");
  }();

  subtract_mean_in_place(init);
  init = project_to_gradient_range(init, n, prob.scheme);
  subtract_mean_in_place(init);

  PhiEvaluation first = eval_phi_full(prob, init, nullptr);
  OptimizerState state{std::move(init), std::move(first), {}, 0, false};
  record(state, cfg);

  if (sup_norm(state.eval.gradient) <= cfg.grad_tol) {
    state.converged = true;
  } else {
    switch (cfg.optimizer) {
      case Optimizer::GradientDescentArmijo:
        run_gradient_descent(prob, cfg, state);
        break;
      case Optimizer::Lbfgs:
        run_lbfgs(prob, cfg, state);
        break;
      case Optimizer::NewtonKrylov:
        run_newton_krylov(prob, cfg, state);
        break;
    }
  }

  const double final_grad_sup = sup_norm(state.eval.gradient);
  SolveReport report{.v = std::move(state.v), .w = std::move(state.eval.w)};
  report.c = field_mean(report.w);
  report.converged = state.converged;
  report.iterations = state.iterations;
  report.final_grad_sup = final_grad_sup;
  report.history = std::move(state.history);

  const HamiltonResidual residual = verify_hamilton(prob, report.w);
  report.hamilton_residual_l2 = residual.l2;
  report.hamilton_residual_sup = residual.sup;
  report.mean_shift_error = mean_shift_check(report.v, report.w, 0.0).max_error;
  report.trivial_solution = sup_norm(report.w) < 1e-10;
  return report;
}

}  // namespace dualact
