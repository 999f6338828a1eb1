#include "dualact/references.hpp"

#include <cmath>
#include <stdexcept>

namespace dualact {
namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_dims(const MultiTimeGrid& grid, int p, const char* what) {
  if (grid.dims() != p) {
    throw std::invalid_argument(std::string(what) + ": grid has the wrong number of time dimensions");
  }
}

}  // namespace

PeriodicField harmonic_circle_orbit(const MultiTimeGrid& grid) {
  require_dims(grid, 1, "harmonic_circle_orbit");
  PeriodicField u = PeriodicField::phase(grid, 1);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double t = static_cast<double>(grid.coordinate(node, 0)) * grid.spacing(0);
    u.at(node, 0) = std::cos(t);
    u.at(node, 1) = -std::sin(t);
  }
  return u;
}

PeriodicField harmonic_circle_positions(const MultiTimeGrid& grid) {
  require_dims(grid, 1, "harmonic_circle_positions");
  PeriodicField x(grid, 1);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double t = static_cast<double>(grid.coordinate(node, 0)) * grid.spacing(0);
    x.at(node, 0) = std::cos(t);
  }
  return x;
}

PeriodicField helmholtz_wave(const MultiTimeGrid& grid) {
  require_dims(grid, 2, "helmholtz_wave");
  PeriodicField u = PeriodicField::phase(grid, 1);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double t1 = static_cast<double>(grid.coordinate(node, 0)) * grid.spacing(0);
    const double t2 = static_cast<double>(grid.coordinate(node, 1)) * grid.spacing(1);
    const double s = (t1 + t2) / kSqrt2;
    u.at(node, 0) = std::cos(s);
    u.at(node, 1) = -std::sin(s) / kSqrt2;
    u.at(node, 2) = -std::sin(s) / kSqrt2;
  }
  return u;
}

PeriodicField helmholtz_wave_positions(const MultiTimeGrid& grid) {
  require_dims(grid, 2, "helmholtz_wave_positions");
  PeriodicField x(grid, 1);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double t1 = static_cast<double>(grid.coordinate(node, 0)) * grid.spacing(0);
    const double t2 = static_cast<double>(grid.coordinate(node, 1)) * grid.spacing(1);
    x.at(node, 0) = std::cos((t1 + t2) / kSqrt2);
  }
  return x;
}

std::optional<PeriodicField> reference_phase_field(const std::string& id,
                                                   const MultiTimeGrid& grid) {
  if (id == "harmonic-circle") {
    return harmonic_circle_orbit(grid);
  }
  if (id == "helmholtz-wave") {
    return helmholtz_wave(grid);
  }
  return std::nullopt;
}

std::optional<PeriodicField> reference_positions(const std::string& id,
                                                 const MultiTimeGrid& grid) {
  if (id == "harmonic-circle") {
    return harmonic_circle_positions(grid);
  }
  if (id == "helmholtz-wave") {
    return helmholtz_wave_positions(grid);
  }
  return std::nullopt;
}

}  // namespace dualact
