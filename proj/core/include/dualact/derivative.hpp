#pragma once

#include <cstddef>
#include <vector>

#include "dualact/field.hpp"
#include "dualact/grid.hpp"

namespace dualact {

enum class DerivativeScheme { Central2, Fourier };

const char* scheme_name(DerivativeScheme scheme);

/// Per-node Jacobian d u_k / d t^a of a periodic field. Layout: node-major,
/// then component, time axis fastest.
class FieldJacobian {
public:
  FieldJacobian(MultiTimeGrid grid, int components)
      : grid_(std::move(grid)),
        components_(components),
        data_(grid_.node_count() * static_cast<std::size_t>(components) *
                  static_cast<std::size_t>(grid_.dims()),
              0.0) {}

  const MultiTimeGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }

  double& at(std::size_t node, int comp, int axis) {
    return data_[(node * static_cast<std::size_t>(components_) +
                  static_cast<std::size_t>(comp)) *
                     static_cast<std::size_t>(grid_.dims()) +
                 static_cast<std::size_t>(axis)];
  }
  double at(std::size_t node, int comp, int axis) const {
    return data_[(node * static_cast<std::size_t>(components_) +
                  static_cast<std::size_t>(comp)) *
                     static_cast<std::size_t>(grid_.dims()) +
                 static_cast<std::size_t>(axis)];
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

private:
  MultiTimeGrid grid_;
  int components_;
  std::vector<double> data_;
};

/// d/dt^axis of every component of a raw node-major buffer (comps entries per
/// node), with periodic wrap. Central2 is the second-order centered stencil;
/// Fourier differentiates the trigonometric interpolant exactly and requires
/// even resolution along the axis (the Nyquist bin has no well-defined odd
/// derivative and is zeroed, keeping the operator real and skew-symmetric).
void differentiate_axis(const MultiTimeGrid& grid, const double* in, double* out,
                        int comps, int axis, DerivativeScheme scheme);

/// Full Jacobian of a field under the chosen scheme.
FieldJacobian derivative(const PeriodicField& field, DerivativeScheme scheme);

/// Polysymplectic contraction of a phase-field Jacobian: component x^i of the
/// result receives sum_a d p_i^a / d t^a and component p_j^b receives
/// -d x^j / d t^b.
PeriodicField polysymplectic_apply(const FieldJacobian& jac, int n);

/// Composition polysymplectic_apply(derivative(field), n); the operator whose
/// kernel/range structure organizes the dual action.
PeriodicField poly_derivative(const PeriodicField& field, int n, DerivativeScheme scheme);

}  // namespace dualact
