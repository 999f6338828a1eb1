#include "dualact/derivative.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace dualact {
namespace {

// FFTW planning is not thread safe; executions on private buffers are.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// One reusable real<->half-complex transform pair of fixed length. Lines are
// copied through the scratch buffers so plans always execute on the arrays
// they were created with.
class SpectralLine {
public:
  SpectralLine(std::size_t n, double period) : n_(n), period_(period) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
  }

  SpectralLine(const SpectralLine&) = delete;
  SpectralLine& operator=(const SpectralLine&) = delete;

  ~SpectralLine() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  double* samples() noexcept { return real_; }

  // In-place spectral derivative of the current samples.
  void differentiate() {
    fftw_execute(fwd_);
    const double base = 2.0 * M_PI / period_;
    spec_[0][0] = 0.0;
    spec_[0][1] = 0.0;
    for (std::size_t j = 1; j < n_ / 2; ++j) {
      const double w = base * static_cast<double>(j);
      const double re = spec_[j][0];
      const double im = spec_[j][1];
      spec_[j][0] = -im * w;
      spec_[j][1] = re * w;
    }
    spec_[n_ / 2][0] = 0.0;  // Nyquist
    spec_[n_ / 2][1] = 0.0;
    fftw_execute(inv_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      real_[i] *= scale;
    }
  }

private:
  std::size_t n_;
  double period_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_{};
  fftw_plan inv_{};
};

// Calls fn(base) for the first node of every grid line along `axis`.
template <typename Fn>
void for_each_line(const MultiTimeGrid& grid, int axis, Fn&& fn) {
  const std::size_t n = grid.resolution(axis);
  const std::size_t stride = grid.stride(axis);
  const std::size_t block = stride * n;
  const std::size_t nodes = grid.node_count();
  for (std::size_t outer = 0; outer < nodes; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      fn(outer + inner);
    }
  }
}

}  // namespace

const char* scheme_name(DerivativeScheme scheme) {
  switch (scheme) {
    case DerivativeScheme::Central2:
      return "central2";
    case DerivativeScheme::Fourier:
      return "fourier";
  }
  return "unknown";
}

void differentiate_axis(const MultiTimeGrid& grid, const double* in, double* out,
                        int comps, int axis, DerivativeScheme scheme) {
  const std::size_t n = grid.resolution(axis);
  const std::size_t stride = grid.stride(axis);
  const std::size_t m = static_cast<std::size_t>(comps);

  if (scheme == DerivativeScheme::Central2) {
    const double inv2h = 1.0 / (2.0 * grid.spacing(axis));
    for_each_line(grid, axis, [&](std::size_t base) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t node = base + i * stride;
        const std::size_t fwd = base + ((i + 1) % n) * stride;
        const std::size_t bwd = base + ((i + n - 1) % n) * stride;
        for (std::size_t c = 0; c < m; ++c) {
          out[node * m + c] = (in[fwd * m + c] - in[bwd * m + c]) * inv2h;
        }
      }
    });
    return;
  }

  if (n % 2 != 0) {
    throw std::invalid_argument("Fourier derivative requires even resolution, got N_" +
                                std::to_string(axis + 1) + " = " + std::to_string(n));
  }
  SpectralLine line(n, grid.period(axis));
  for_each_line(grid, axis, [&](std::size_t base) {
    for (std::size_t c = 0; c < m; ++c) {
      double* scratch = line.samples();
      for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = in[(base + i * stride) * m + c];
      }
      line.differentiate();
      for (std::size_t i = 0; i < n; ++i) {
        out[(base + i * stride) * m + c] = scratch[i];
      }
    }
  });
}

FieldJacobian derivative(const PeriodicField& field, DerivativeScheme scheme) {
  const MultiTimeGrid& grid = field.grid();
  const int p = grid.dims();
  const int m = field.components();
  FieldJacobian jac(grid, m);

  std::vector<double> axis_out(field.size());
  for (int a = 0; a < p; ++a) {
    differentiate_axis(grid, field.data().data(), axis_out.data(), m, a, scheme);
    const std::size_t nodes = grid.node_count();
    for (std::size_t node = 0; node < nodes; ++node) {
      for (int c = 0; c < m; ++c) {
        jac.at(node, c, a) =
            axis_out[node * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
      }
    }
  }
  return jac;
}

PeriodicField polysymplectic_apply(const FieldJacobian& jac, int n) {
  const MultiTimeGrid& grid = jac.grid();
  const int p = grid.dims();
  if (jac.components() != phase_components(n, p)) {
    throw std::invalid_argument("polysymplectic_apply: Jacobian is not a phase field Jacobian");
  }
  PeriodicField out = PeriodicField::phase(grid, n);
  const std::size_t nodes = grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    auto values = out.node(node);
    for (int i = 0; i < n; ++i) {
      double div = 0.0;
      for (int a = 0; a < p; ++a) {
        div += jac.at(node, momentum_component(n, p, i, a), a);
      }
      values[static_cast<std::size_t>(x_component(i))] = div;
    }
    for (int j = 0; j < n; ++j) {
      for (int b = 0; b < p; ++b) {
        values[static_cast<std::size_t>(momentum_component(n, p, j, b))] =
            -jac.at(node, x_component(j), b);
      }
    }
  }
  return out;
}

PeriodicField poly_derivative(const PeriodicField& field, int n, DerivativeScheme scheme) {
  return polysymplectic_apply(derivative(field, scheme), n);
}

}  // namespace dualact
