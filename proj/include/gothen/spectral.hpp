#pragma once

// FFT-backed operators on periodic fields: Laplacians and the shifted Poisson
// solve used as the Newton preconditioner.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string_view>
#include <vector>

#include "gothen/grid.hpp"

namespace gothen {

enum class LaplacianMethod { spectral, fd5 };

inline std::string_view to_string(LaplacianMethod m) {
  return m == LaplacianMethod::spectral ? "spectral" : "fd5";
}

inline LaplacianMethod parse_laplacian_method(std::string_view s) {
  if (s == "spectral") return LaplacianMethod::spectral;
  if (s == "fd5") return LaplacianMethod::fd5;
  throw InvalidArgument("unknown laplacian method '" + std::string(s) +
                        "' (expected spectral or fd5)");
}

namespace detail {

// One r2c/c2r plan pair per resolution. FFTW planning is not thread-safe, so
// creation is serialized; execution copies through the plan's own buffers
// under a per-plan lock.
class FftPlan {
public:
  explicit FftPlan(int n) : n_(n), half_(n / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(n) * half_);
    forward_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  // Applies a real Fourier multiplier symbol(kx, ky) to f. Frequencies are
  // signed integers in (-N/2, N/2]; the multiplier must be even in k.
  template <typename Symbol>
  RealField apply(const RealField& f, Symbol&& symbol) {
    std::lock_guard lock(mutex_);
    const int n = n_;
    // FFTW's 2d layout is row-major [n0][n1]; rows are y, matching Field.
    std::copy(f.values().begin(), f.values().end(), real_);
    fftw_execute(forward_);
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (int iy = 0; iy < n; ++iy) {
      const int ky = iy <= n / 2 ? iy : iy - n;
      for (int ix = 0; ix < half_; ++ix) {
        const double s = symbol(ix, ky) * norm;
        auto& c = spec_[static_cast<std::size_t>(iy) * half_ + ix];
        c[0] *= s;
        c[1] *= s;
      }
    }
    fftw_execute(backward_);
    RealField out(f.grid());
    std::copy(real_, real_ + out.size(), out.values().begin());
    return out;
  }

  /// Mean-normalized coefficient moduli |f_k| indexed like the r2c output.
  std::vector<double> coefficient_moduli(const RealField& f) {
    std::lock_guard lock(mutex_);
    std::copy(f.values().begin(), f.values().end(), real_);
    fftw_execute(forward_);
    const double norm = 1.0 / (static_cast<double>(n_) * n_);
    std::vector<double> out(static_cast<std::size_t>(n_) * half_);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = std::hypot(spec_[k][0], spec_[k][1]) * norm;
    }
    return out;
  }

  int half() const noexcept { return half_; }

private:
  int n_;
  int half_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::mutex mutex_;
};

inline FftPlan& plan_for(int n) {
  static std::mutex registry_mutex;
  static std::map<int, std::unique_ptr<FftPlan>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

inline double spectral_symbol(int kx, int ky) {
  const double two_pi = 2.0 * std::numbers::pi;
  return -two_pi * two_pi * (static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
}

// Eigenvalue of the wrap-around 5-point stencil on mode (kx, ky).
inline double fd5_symbol(int kx, int ky, int n) {
  const double h2 = 1.0 / (static_cast<double>(n) * n);
  const double sx = std::sin(std::numbers::pi * kx / n);
  const double sy = std::sin(std::numbers::pi * ky / n);
  return -4.0 * (sx * sx + sy * sy) / h2;
}

}  // namespace detail

/// Eigenvalue of the chosen discrete Laplacian on Fourier mode (kx, ky).
inline double laplacian_symbol(LaplacianMethod method, int kx, int ky, int n) {
  return method == LaplacianMethod::spectral ? detail::spectral_symbol(kx, ky)
                                             : detail::fd5_symbol(kx, ky, n);
}

inline RealField laplacian_fd5(const RealField& f) {
  const int n = f.n();
  const double inv_h2 = static_cast<double>(n) * n;
  RealField out(f.grid());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      out(ix, iy) = (f(ix + 1, iy) + f(ix - 1, iy) + f(ix, iy + 1) + f(ix, iy - 1) -
                     4.0 * f(ix, iy)) *
                    inv_h2;
    }
  }
  return out;
}

/// Flat Laplacian d_xx + d_yy = 4 d_z d_zbar on the unit torus.
inline RealField laplacian(const RealField& f, LaplacianMethod method = LaplacianMethod::spectral) {
  if (method == LaplacianMethod::fd5) return laplacian_fd5(f);
  return detail::plan_for(f.n()).apply(f, detail::spectral_symbol);
}

/// Solves (L - c) u = f for u, where L is the chosen discrete Laplacian and
/// c > 0. Diagonal in Fourier space for both methods.
inline RealField shifted_poisson_solve(const RealField& f, double shift, LaplacianMethod method) {
  if (!(shift > 0.0)) throw InvalidArgument("shifted Poisson solve needs a positive shift");
  const int n = f.n();
  return detail::plan_for(n).apply(f, [&](int kx, int ky) {
    return 1.0 / (laplacian_symbol(method, kx, ky, n) - shift);
  });
}

namespace detail {

inline int band_from_moduli(std::span<const std::vector<double>> parts, int n, int half,
                            double rel_tol) {
  double peak = 0.0;
  for (const auto& m : parts) peak = std::max(peak, *std::max_element(m.begin(), m.end()));
  if (peak == 0.0) return 0;
  int band = 0;
  for (const auto& m : parts) {
    for (int iy = 0; iy < n; ++iy) {
      const int ky = iy <= n / 2 ? iy : iy - n;
      for (int ix = 0; ix < half; ++ix) {
        if (m[static_cast<std::size_t>(iy) * half + ix] > rel_tol * peak) {
          band = std::max({band, ix, std::abs(ky)});
        }
      }
    }
  }
  return band;
}

}  // namespace detail

/// Largest |k| component carrying a coefficient above rel_tol * max|coeff|.
/// Used to recover the band of fields that were not built from coefficients.
inline int detect_band(const RealField& f, double rel_tol = 1e-12) {
  auto& plan = detail::plan_for(f.n());
  const std::vector<double> parts[] = {plan.coefficient_moduli(f)};
  return detail::band_from_moduli(parts, f.n(), plan.half(), rel_tol);
}

inline int detect_band(const ComplexField& f, double rel_tol = 1e-12) {
  auto& plan = detail::plan_for(f.n());
  const std::vector<double> parts[] = {
      plan.coefficient_moduli(map(f, [](Complex z) { return z.real(); })),
      plan.coefficient_moduli(map(f, [](Complex z) { return z.imag(); }))};
  return detail::band_from_moduli(parts, f.n(), plan.half(), rel_tol);
}

}  // namespace gothen
