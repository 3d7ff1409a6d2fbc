#pragma once

// Periodic fields on a uniform N x N grid over the unit square torus.
//
// Storage is row-major with rows along y: value(ix, iy) lives at iy * N + ix,
// and sample (ix, iy) sits at (x, y) = (ix / N, iy / N).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gothen/error.hpp"

namespace gothen {

using Complex = std::complex<double>;

class GridSpec {
public:
  explicit GridSpec(int n) : n_(n) {
    if (n < 16 || n % 2 != 0) {
      throw InvalidArgument("grid resolution must be even and >= 16, got " +
                            std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  double spacing() const noexcept { return 1.0 / n_; }
  double coord(int i) const noexcept { return static_cast<double>(i) / n_; }

  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(wrap(iy)) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(wrap(ix));
  }
  int wrap(int i) const noexcept {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  /// Modes |k| < N/2 in each component are representable without aliasing.
  bool in_band(int kx, int ky) const noexcept {
    return 2 * std::abs(kx) < n_ && 2 * std::abs(ky) < n_;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
  int n_;
};

template <typename T>
class Field {
public:
  using value_type = T;

  explicit Field(GridSpec grid, T fill = T{})
      : grid_(grid), values_(grid.size(), fill) {}
  Field(GridSpec grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw InvalidArgument("field size does not match grid");
    }
  }

  /// Samples f(x, y) at every grid point.
  template <typename F>
  static Field sample(GridSpec grid, F&& f) {
    Field out(grid);
    const int n = grid.n();
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        out.values_[grid.index(ix, iy)] =
            static_cast<T>(f(grid.coord(ix), grid.coord(iy)));
      }
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator()(int ix, int iy) noexcept { return values_[grid_.index(ix, iy)]; }
  const T& operator()(int ix, int iy) const noexcept {
    return values_[grid_.index(ix, iy)];
  }
  T& operator[](std::size_t k) noexcept { return values_[k]; }
  const T& operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  const std::vector<T>& storage() const noexcept { return values_; }

  Field& operator+=(const Field& o) { return zip_assign(o, [](T a, T b) { return a + b; }); }
  Field& operator-=(const Field& o) { return zip_assign(o, [](T a, T b) { return a - b; }); }
  Field& operator*=(const Field& o) { return zip_assign(o, [](T a, T b) { return a * b; }); }
  Field& operator*=(T s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  Field& operator+=(T s) {
    for (auto& v : values_) v += s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(Field a, T s) { return a *= s; }
  friend Field operator*(T s, Field a) { return a *= s; }
  friend Field operator+(Field a, T s) { return a += s; }

  friend bool operator==(const Field&, const Field&) = default;

private:
  template <typename Op>
  Field& zip_assign(const Field& o, Op op) {
    if (!(o.grid_ == grid_)) throw InvalidArgument("fields live on different grids");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = op(values_[k], o.values_[k]);
    return *this;
  }

  GridSpec grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

/// Elementwise map; the result type follows the callable.
template <typename T, typename F>
auto map(const Field<T>& f, F&& op) {
  using R = std::decay_t<decltype(op(std::declval<T>()))>;
  Field<R> out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = op(f[k]);
  return out;
}

template <typename T, typename U, typename F>
auto zip(const Field<T>& a, const Field<U>& b, F&& op) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
  using R = std::decay_t<decltype(op(std::declval<T>(), std::declval<U>()))>;
  Field<R> out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = op(a[k], b[k]);
  return out;
}

inline RealField modulus_squared(const ComplexField& f) {
  return map(f, [](Complex z) { return std::norm(z); });
}

inline RealField modulus(const ComplexField& f) {
  return map(f, [](Complex z) { return std::abs(z); });
}

template <typename T>
double sup_norm(const Field<T>& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

inline double sup_distance(const RealField& a, const RealField& b) {
  return sup_norm(a - b);
}

inline double max_value(const RealField& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

inline double min_value(const RealField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

inline bool all_finite(const RealField& f) {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return std::isfinite(v); });
}

/// Mean over the torus: (1/N^2) * sum f. Sequential summation, so the result
/// is bitwise reproducible for a fixed resolution.
inline double integrate(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum / static_cast<double>(f.size());
}

/// Injection of a fine field onto a coarser grid whose resolution divides it.
template <typename T>
Field<T> restrict_field(const Field<T>& fine, GridSpec coarse) {
  if (fine.n() % coarse.n() != 0) {
    throw InvalidArgument("restriction needs the coarse resolution to divide the fine one");
  }
  const int stride = fine.n() / coarse.n();
  Field<T> out(coarse);
  for (int iy = 0; iy < coarse.n(); ++iy) {
    for (int ix = 0; ix < coarse.n(); ++ix) out(ix, iy) = fine(ix * stride, iy * stride);
  }
  return out;
}

struct Mode {
  int kx = 0;
  int ky = 0;
  friend bool operator==(const Mode&, const Mode&) = default;
};

struct FourierTerm {
  Mode mode;
  Complex coeff;
};

/// Largest |k| component over the listed modes (0 for an empty list).
inline int band_of(std::span<const FourierTerm> terms) {
  int band = 0;
  for (const auto& t : terms) band = std::max({band, std::abs(t.mode.kx), std::abs(t.mode.ky)});
  return band;
}

/// Samples sum_k c_k exp(2 pi i (k1 x + k2 y)). Phases are reduced modulo N
/// with integer arithmetic so the samples are exact up to one rounding of the
/// tabulated roots of unity.
inline ComplexField sample_fourier(std::span<const FourierTerm> terms, GridSpec grid) {
  const int n = grid.n();
  for (const auto& t : terms) {
    if (!grid.in_band(t.mode.kx, t.mode.ky)) {
      throw InvalidArgument("mode (" + std::to_string(t.mode.kx) + "," +
                            std::to_string(t.mode.ky) + ") violates the band limit |k| < " +
                            std::to_string(n / 2) + " at N=" + std::to_string(n));
    }
  }
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double a = 2.0 * std::numbers::pi * m / n;
    roots[static_cast<std::size_t>(m)] = {std::cos(a), std::sin(a)};
  }
  ComplexField out(grid);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      Complex v{0.0, 0.0};
      for (const auto& t : terms) {
        const long long phase = static_cast<long long>(t.mode.kx) * ix +
                                static_cast<long long>(t.mode.ky) * iy;
        v += t.coeff * roots[static_cast<std::size_t>(grid.wrap(static_cast<int>(phase % n)))];
      }
      out(ix, iy) = v;
    }
  }
  return out;
}

}  // namespace gothen
