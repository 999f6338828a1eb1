#pragma once

#include <optional>
#include <string>

#include "dualact/field.hpp"
#include "dualact/grid.hpp"

namespace dualact {

/// Built-in analytic reference fields for verification and refinement sweeps.

/// p = 1, n = 1 circle orbit u = (cos t, -sin t); solves the first-order
/// system for H = (x^2 + p^2)/2 on T = 2*pi.
PeriodicField harmonic_circle_orbit(const MultiTimeGrid& grid);
/// Positions only (one component).
PeriodicField harmonic_circle_positions(const MultiTimeGrid& grid);

/// p = 2, n = 1 plane wave x = cos((t1+t2)/sqrt2), p^a = -sin((t1+t2)/sqrt2)/sqrt2;
/// solves the first-order system for H = (x^2 + (p1)^2 + (p2)^2)/2 on the box
/// with both periods 2*pi*sqrt2.
PeriodicField helmholtz_wave(const MultiTimeGrid& grid);
PeriodicField helmholtz_wave_positions(const MultiTimeGrid& grid);

/// Looks up a reference phase field by scenario id ("harmonic-circle",
/// "helmholtz-wave"); empty optional when the id is unknown.
std::optional<PeriodicField> reference_phase_field(const std::string& id,
                                                   const MultiTimeGrid& grid);
std::optional<PeriodicField> reference_positions(const std::string& id,
                                                 const MultiTimeGrid& grid);

}  // namespace dualact
