#pragma once

#include <vector>

#include "dualact/conjugate.hpp"
#include "dualact/derivative.hpp"
#include "dualact/field.hpp"
#include "dualact/grid.hpp"
#include "dualact/hamiltonian.hpp"

namespace dualact {

/// Discrete action setup: grid, Hamiltonian, derivative scheme; the cell
/// volume is the quadrature weight. Node-wise conjugations inherit `newton`.
/// All evaluations are pure; `threads > 1` parallelizes the per-node
/// conjugation sweep (reductions stay serial in canonical node order).
struct ActionProblem {
  MultiTimeGrid grid;
  HamiltonianModel hamiltonian;
  DerivativeScheme scheme = DerivativeScheme::Central2;
  ConjugateOptions newton;
  int threads = 1;

  /// Throws if the Hamiltonian dimensions do not match the grid.
  void validate() const;
};

/// Hamiltonian action
///   Psi(u) = sum_nodes [ -1/2 <(dxJ)Du, u> - H(t,u) ] * cellvol.
double eval_psi(const ActionProblem& prob, const PeriodicField& u);

/// One evaluation of the dual action and everything produced on the way.
/// With B = polysymplectic o derivative:
///   vstar    = B v,
///   w        = grad H*(t, vstar)   (node-wise conjugation argmax),
///   value    = sum_nodes [ 1/2 <vstar, v> + H*(t, vstar) ] * cellvol,
///   gradient = cellvol * B(v + w),
/// the exact gradient of the discrete sum (B is self-adjoint because both
/// derivative schemes are skew-adjoint on periodic grids). The argmax sweep
/// is shared between value and gradient; nothing is conjugated twice.
struct PhiEvaluation {
  double value = 0.0;
  PeriodicField gradient;
  PeriodicField vstar;
  PeriodicField w;
};

PhiEvaluation eval_phi_full(const ActionProblem& prob, const PeriodicField& v,
                            const PeriodicField* w_guess = nullptr);

/// Dual action value only.
double eval_phi(const ActionProblem& prob, const PeriodicField& v);

/// Exact discrete gradient of eval_phi with respect to nodal values. Always
/// mean-free: constants are invisible to the dual action.
PeriodicField grad_phi(const ActionProblem& prob, const PeriodicField& v);

/// Node-wise conjugation sweep u(t) = grad H*(t, field(t)). Serial sweeps warm
/// start each node from the previous node's argmax; parallel sweeps start
/// every node from `guess` (or zero) so results are order independent.
/// Conjugation failures are rethrown with the node coordinates attached.
/// When `values` is non-null it receives H*(t, field(t)) per node.
PeriodicField conjugate_sweep(const ActionProblem& prob, const PeriodicField& field,
                              const PeriodicField* guess, std::vector<double>* values);

}  // namespace dualact
