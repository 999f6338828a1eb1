#include "dualact/field.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kahan.hpp"

namespace dualact {

double metric_inner(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k] * b[k];
  }
  return acc;
}

Eigen::VectorXd field_mean(const PeriodicField& field) {
  const int m = field.components();
  std::vector<detail::KahanSum> acc(static_cast<std::size_t>(m));
  const std::size_t nodes = field.grid().node_count();
  for (std::size_t idx = 0; idx < nodes; ++idx) {
    const auto values = field.node(idx);
    for (int k = 0; k < m; ++k) {
      acc[static_cast<std::size_t>(k)].add(values[static_cast<std::size_t>(k)]);
    }
  }
  Eigen::VectorXd mean(m);
  for (int k = 0; k < m; ++k) {
    mean[k] = acc[static_cast<std::size_t>(k)].value() / static_cast<double>(nodes);
  }
  return mean;
}

void subtract_mean_in_place(PeriodicField& field) {
  const Eigen::VectorXd mean = field_mean(field);
  const int m = field.components();
  const std::size_t nodes = field.grid().node_count();
  for (std::size_t idx = 0; idx < nodes; ++idx) {
    auto values = field.node(idx);
    for (int k = 0; k < m; ++k) {
      values[static_cast<std::size_t>(k)] -= mean[k];
    }
  }
}

PeriodicField zero_mean_projected(const PeriodicField& field) {
  PeriodicField out = field;
  subtract_mean_in_place(out);
  return out;
}

double field_dot(const PeriodicField& a, const PeriodicField& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("field_dot: mismatched field sizes");
  }
  detail::KahanSum acc;
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) {
    acc.add(da[k] * db[k]);
  }
  return acc.value();
}

double sup_norm(const PeriodicField& field) {
  double m = 0.0;
  for (double v : field.data()) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double grid_l2_norm(const PeriodicField& field) {
  detail::KahanSum acc;
  for (double v : field.data()) {
    acc.add(v * v);
  }
  return std::sqrt(acc.value() * field.grid().cell_volume());
}

void axpy_in_place(double alpha, const PeriodicField& x, PeriodicField& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("axpy_in_place: mismatched field sizes");
  }
  const auto& dx = x.data();
  auto& dy = y.data();
  for (std::size_t k = 0; k < dx.size(); ++k) {
    dy[k] += alpha * dx[k];
  }
}

void scale_in_place(PeriodicField& field, double alpha) {
  for (double& v : field.data()) {
    v *= alpha;
  }
}

}  // namespace dualact
