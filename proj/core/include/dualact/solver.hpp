#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dualact/action.hpp"
#include "dualact/field.hpp"

namespace dualact {

/// GradientDescentArmijo and Lbfgs descend on the dual action itself and suit
/// problems where the sought critical point minimizes it. NewtonKrylov solves
/// the criticality system grad Phi(v) = 0 as a Gauss-Newton least-squares
/// problem with conjugate-gradient inner iterations; it converges to saddle
/// critical points too, which descent cannot reach.
enum class Optimizer { GradientDescentArmijo, Lbfgs, NewtonKrylov };

enum class InitKind { Zero, RandomSmooth, Supplied };

struct SolveConfig {
  int max_iters = 500;
  double grad_tol = 1e-8;  // stopping: sup-norm of the discrete action gradient
  Optimizer optimizer = Optimizer::Lbfgs;
  int lbfgs_memory = 10;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Zero;
  int init_kmax = 2;            // RandomSmooth band limit
  double init_amplitude = 1.0;  // RandomSmooth scale
  std::optional<PeriodicField> supplied_init;
  int newton_max_inner = 400;      // CG cap per NewtonKrylov step
  double newton_inner_tol = 1e-3;  // relative linear-residual target per step
  /// Monitoring hook, called with every accepted iterate (including the
  /// initial one). Deterministic given config and seed.
  std::function<void(int iter, const PeriodicField& v)> on_iterate;
};

struct HistoryEntry {
  int iter = 0;
  double phi = 0.0;
  double grad_sup = 0.0;
};

struct SolveReport {
  PeriodicField v;     // zero-mean critical point (or best iterate)
  PeriodicField w;     // recovered phase field grad H*(t, (dxJ)Dv)
  Eigen::VectorXd c;   // mean of w
  bool converged = false;
  int iterations = 0;
  double final_grad_sup = 0.0;
  double hamilton_residual_l2 = 0.0;
  double hamilton_residual_sup = 0.0;
  double mean_shift_error = 0.0;  // sup-norm deviation from the mean-shift identity
  bool trivial_solution = false;  // sup-norm of w below 1e-10
  std::vector<HistoryEntry> history;
};

/// Critical-point search for the discrete dual action on zero-mean periodic
/// fields. Every iterate is projected back onto the zero-mean subspace; the
/// initial iterate is additionally projected onto the range of the
/// symplectic-derivative operator, whose kernel the gradient cannot see.
/// On return the Hamilton recovery and verification results are filled in.
/// Deterministic given config and seed.
SolveReport solve_periodic(const ActionProblem& prob, const SolveConfig& cfg);

/// Node-wise recovery w(t) = grad H*(t, ((dxJ)Dv)(t)).
PeriodicField recover_w(const ActionProblem& prob, const PeriodicField& v);

struct HamiltonResidual {
  double l2 = 0.0;
  double sup = 0.0;
};

/// Residual of the first-order system, R(w) = (dxJ)Dw + grad H(t,w), in the
/// grid L2 norm and the sup norm. This sign convention is canonical for the
/// whole library.
HamiltonResidual verify_hamilton(const ActionProblem& prob, const PeriodicField& w);

struct MeanShiftReport {
  Eigen::VectorXd c;
  double max_error = 0.0;
  std::size_t argmax_node = 0;
  bool passed = false;
  double tol = 0.0;
};

/// Checks the mean-shift identity tying a critical point to its recovered
/// solution: v differs from -w by the constant c = mean(w), i.e.
/// |v + w - mean(w)|_inf <= tol.
MeanShiftReport mean_shift_check(const PeriodicField& v, const PeriodicField& w, double tol);

/// Band-limited random field: independent Gaussian amplitudes on all modes
/// with |k|_inf <= kmax (k != 0), normalized so the expected RMS per
/// component is `amplitude`. Mean-free by construction.
PeriodicField random_smooth_field(const MultiTimeGrid& grid, int components, int kmax,
                                  double amplitude, std::uint64_t seed);

/// Orthogonal projection onto the range of B = polysymplectic o derivative.
/// Removes the components invisible to the dual-action gradient: position
/// modes annihilated by the scheme's derivative (constants; Nyquist modes)
/// and, for p >= 2, divergence-free momentum modes.
PeriodicField project_to_gradient_range(const PeriodicField& v, int n, DerivativeScheme scheme);

}  // namespace dualact
