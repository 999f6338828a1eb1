#include "dualact/grid.hpp"

#include <stdexcept>
#include <string>

namespace dualact {

MultiTimeGrid::MultiTimeGrid(std::vector<double> periods, std::vector<std::size_t> resolution)
    : periods_(std::move(periods)), resolution_(std::move(resolution)) {
  if (periods_.empty()) {
    throw std::invalid_argument("grid needs at least one time dimension");
  }
  if (periods_.size() != resolution_.size()) {
    throw std::invalid_argument("grid periods and resolution must have equal length");
  }
  spacing_.resize(periods_.size());
  for (std::size_t a = 0; a < periods_.size(); ++a) {
    if (!(periods_[a] > 0.0)) {
      throw std::invalid_argument("grid period T^" + std::to_string(a + 1) +
                                  " must be positive");
    }
    if (resolution_[a] < 4) {
      throw std::invalid_argument("grid resolution N_" + std::to_string(a + 1) +
                                  " must be at least 4 nodes");
    }
    spacing_[a] = periods_[a] / static_cast<double>(resolution_[a]);
  }
  node_count_ = 1;
  constexpr std::size_t kNodeLimit = std::size_t{1} << 40;
  for (std::size_t n : resolution_) {
    if (node_count_ > kNodeLimit / n) {
      throw std::invalid_argument("grid node count does not fit addressable memory");
    }
    node_count_ *= n;
  }
  strides_.assign(periods_.size(), 1);
  for (int a = static_cast<int>(periods_.size()) - 2; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a) + 1] * resolution_[static_cast<std::size_t>(a) + 1];
  }
  for (std::size_t a = 0; a < periods_.size(); ++a) {
    cell_volume_ *= spacing_[a];
    box_volume_ *= periods_[a];
  }
}

std::size_t MultiTimeGrid::flatten(std::span<const std::size_t> indices) const {
  std::size_t node = 0;
  for (std::size_t a = 0; a < periods_.size(); ++a) {
    node += (indices[a] % resolution_[a]) * strides_[a];
  }
  return node;
}

void MultiTimeGrid::unflatten(std::size_t node, std::span<std::size_t> indices) const {
  for (std::size_t a = 0; a < periods_.size(); ++a) {
    indices[a] = (node / strides_[a]) % resolution_[a];
  }
}

std::size_t MultiTimeGrid::neighbor(std::size_t node, int axis, long offset) const {
  const std::size_t a = static_cast<std::size_t>(axis);
  const long n = static_cast<long>(resolution_[a]);
  const std::size_t i = (node / strides_[a]) % resolution_[a];
  const long j = ((static_cast<long>(i) + offset) % n + n) % n;
  const std::size_t base = node - i * strides_[a];
  return base + static_cast<std::size_t>(j) * strides_[a];
}

std::vector<double> MultiTimeGrid::time_at(std::size_t node) const {
  std::vector<double> t(periods_.size());
  for (std::size_t a = 0; a < periods_.size(); ++a) {
    t[a] = static_cast<double>((node / strides_[a]) % resolution_[a]) * spacing_[a];
  }
  return t;
}

}  // namespace dualact
