#pragma once

namespace dualact::detail {

// Compensated (Kahan) accumulator; fixed-order sums stay reproducible and
// keep cancellation error at the per-term rounding level.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

}  // namespace dualact::detail
