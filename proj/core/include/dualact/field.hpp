#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "dualact/grid.hpp"

namespace dualact {

/// Number of phase components for n states over p times: u = (x^i, p_i^a).
inline int phase_components(int n, int p) { return n * (1 + p); }

/// Component index of x^i (0-based i).
inline int x_component(int i) { return i; }

/// Component index of p_i^a (0-based i and a). Momenta are grouped by state
/// index first, time index fastest:
///   (x^1 .. x^n, p_1^1 .. p_1^p, ..., p_n^1 .. p_n^p).
inline int momentum_component(int n, int p, int i, int a) { return n + i * p + a; }

/// Grid-sampled periodic map t -> R^m, stored node-major in canonical node
/// order. Periodicity is structural (wrapped indexing), u(T) is u(0).
class PeriodicField {
public:
  PeriodicField(MultiTimeGrid grid, int components)
      : grid_(std::move(grid)),
        components_(components),
        data_(grid_.node_count() * static_cast<std::size_t>(components), 0.0) {}

  /// Phase-space field u = (x, p) with components n*(1+p).
  static PeriodicField phase(MultiTimeGrid grid, int n) {
    const int p = grid.dims();
    return PeriodicField(std::move(grid), phase_components(n, p));
  }

  const MultiTimeGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> node(std::size_t idx) {
    return {data_.data() + idx * static_cast<std::size_t>(components_),
            static_cast<std::size_t>(components_)};
  }
  std::span<const double> node(std::size_t idx) const {
    return {data_.data() + idx * static_cast<std::size_t>(components_),
            static_cast<std::size_t>(components_)};
  }

  double& at(std::size_t idx, int comp) {
    return data_[idx * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp)];
  }
  double at(std::size_t idx, int comp) const {
    return data_[idx * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp)];
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

private:
  MultiTimeGrid grid_;
  int components_;
  std::vector<double> data_;
};

/// Euclidean pairing of two same-dimension vectors; the metric is the
/// identity in these coordinates (delta_ij and delta^ab delta_ij blocks).
double metric_inner(std::span<const double> a, std::span<const double> b);

/// Node average, one entry per component (equals the normalized box integral
/// under the rectangle rule).
Eigen::VectorXd field_mean(const PeriodicField& field);

/// Subtracts the node average from every node; mean(result) is 0 to rounding.
PeriodicField zero_mean_projected(const PeriodicField& field);
void subtract_mean_in_place(PeriodicField& field);

/// Plain nodal dot product sum_nodes <a(node), b(node)>.
double field_dot(const PeriodicField& a, const PeriodicField& b);

double sup_norm(const PeriodicField& field);

/// Grid L2 norm sqrt(sum_nodes |f(node)|^2 * cell_volume).
double grid_l2_norm(const PeriodicField& field);

/// y += alpha * x (same grid and component count).
void axpy_in_place(double alpha, const PeriodicField& x, PeriodicField& y);

void scale_in_place(PeriodicField& field, double alpha);

}  // namespace dualact
