#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dualact {

/// Uniform periodic lattice over the time box [0,T^1) x ... x [0,T^p).
///
/// Node (i_1,...,i_p) sits at t^a = i_a * spacing(a); indexing wraps modulo
/// the per-dimension resolution, so the sample at t^a = T^a is the sample at
/// t^a = 0 and is never stored twice. The flattened node order is row-major
/// with the last dimension fastest; that order is the canonical traversal
/// used everywhere (reductions, CSV output, warm starts).
class MultiTimeGrid {
public:
  MultiTimeGrid(std::vector<double> periods, std::vector<std::size_t> resolution);

  int dims() const noexcept { return static_cast<int>(periods_.size()); }
  double period(int axis) const { return periods_[static_cast<std::size_t>(axis)]; }
  std::size_t resolution(int axis) const { return resolution_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  const std::vector<double>& periods() const noexcept { return periods_; }
  const std::vector<std::size_t>& resolutions() const noexcept { return resolution_; }

  std::size_t node_count() const noexcept { return node_count_; }
  /// Quadrature weight of one cell, h_1 * ... * h_p.
  double cell_volume() const noexcept { return cell_volume_; }
  /// T^1 * ... * T^p.
  double box_volume() const noexcept { return box_volume_; }

  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  /// Flat index of a multi-index; entries wrap modulo the resolution.
  std::size_t flatten(std::span<const std::size_t> indices) const;
  void unflatten(std::size_t node, std::span<std::size_t> indices) const;
  std::size_t coordinate(std::size_t node, int axis) const {
    return (node / strides_[static_cast<std::size_t>(axis)]) %
           resolution_[static_cast<std::size_t>(axis)];
  }
  /// Periodic neighbor: node shifted by `offset` cells along `axis`.
  std::size_t neighbor(std::size_t node, int axis, long offset) const;

  std::vector<double> time_at(std::size_t node) const;

  bool operator==(const MultiTimeGrid&) const = default;

private:
  std::vector<double> periods_;
  std::vector<std::size_t> resolution_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
  double cell_volume_ = 1.0;
  double box_volume_ = 1.0;
};

}  // namespace dualact
