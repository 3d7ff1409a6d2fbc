#pragma once

// Gothen parameter pair (mu, nu), the quartic differential q = mu * nu, the
// C* action (mu, nu) -> (lambda mu, nu / lambda) and the Hitchin-fiber
// representative (1, q).

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "gothen/grid.hpp"
#include "gothen/spectral.hpp"

namespace gothen {

/// Fields whose max modulus is at or below this are treated as identically zero.
inline constexpr double kZeroFieldThreshold = 1e-12;

/// Smallest admissible resolution that represents modes up to `band`.
inline int minimum_resolution_for_band(int band) {
  return std::max(16, 2 * (band + 1));
}

namespace detail {

inline void require_nonzero(const ComplexField& f, const char* name) {
  if (sup_norm(f) <= kZeroFieldThreshold) {
    throw InvalidArgument(std::string(name) + " ≡ 0 unsolvable on periodic domain");
  }
}

inline std::uint64_t fnv1a(std::uint64_t h, std::span<const Complex> values) {
  for (const Complex& z : values) {
    double parts[2] = {z.real(), z.imag()};
    unsigned char bytes[sizeof parts];
    std::memcpy(bytes, parts, sizeof parts);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace detail

class QuarticDifferential {
public:
  QuarticDifferential(ComplexField q, int band) : q_(std::move(q)), band_(band) {}

  const ComplexField& field() const noexcept { return q_; }
  const GridSpec& grid() const noexcept { return q_.grid(); }
  int band() const noexcept { return band_; }
  bool vanishes_identically() const { return sup_norm(q_) <= kZeroFieldThreshold; }

  /// t * q, the ray through q in the Hitchin base.
  QuarticDifferential scaled(double t) const { return {q_ * Complex{t, 0.0}, band_}; }

private:
  ComplexField q_;
  int band_;
};

class HiggsData {
public:
  /// Builds (mu, nu) from value arrays; bands are recovered spectrally.
  HiggsData(ComplexField mu, ComplexField nu)
      : HiggsData(std::move(mu), std::move(nu), -1, -1) {}

  HiggsData(ComplexField mu, ComplexField nu, int mu_band, int nu_band)
      : mu_(std::move(mu)), nu_(std::move(nu)) {
    if (!(mu_.grid() == nu_.grid())) throw InvalidArgument("mu and nu live on different grids");
    detail::require_nonzero(mu_, "μ");
    detail::require_nonzero(nu_, "ν");
    mu_band_ = mu_band >= 0 ? mu_band : detect_band(mu_);
    nu_band_ = nu_band >= 0 ? nu_band : detect_band(nu_);
  }

  static HiggsData from_coefficients(std::span<const FourierTerm> mu_terms,
                                     std::span<const FourierTerm> nu_terms, GridSpec grid) {
    return HiggsData(sample_fourier(mu_terms, grid), sample_fourier(nu_terms, grid),
                     band_of(mu_terms), band_of(nu_terms));
  }

  /// Constant pair (m, n).
  static HiggsData constant(GridSpec grid, Complex m, Complex n) {
    return HiggsData(ComplexField(grid, m), ComplexField(grid, n), 0, 0);
  }

  const ComplexField& mu() const noexcept { return mu_; }
  const ComplexField& nu() const noexcept { return nu_; }
  const GridSpec& grid() const noexcept { return mu_.grid(); }
  int mu_band() const noexcept { return mu_band_; }
  int nu_band() const noexcept { return nu_band_; }

  RealField mu_modulus_squared() const { return modulus_squared(mu_); }
  RealField nu_modulus_squared() const { return modulus_squared(nu_); }

  /// FNV-1a hash over the raw bytes of mu then nu; identifies the data a
  /// persisted solution was computed from.
  std::uint64_t provenance_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = detail::fnv1a(h, mu_.values());
    return detail::fnv1a(h, nu_.values());
  }

private:
  ComplexField mu_;
  ComplexField nu_;
  int mu_band_ = 0;
  int nu_band_ = 0;
};

inline QuarticDifferential quartic(const HiggsData& data) {
  const int band = data.mu_band() + data.nu_band();
  if (!data.grid().in_band(band, 0)) {
    throw InvalidArgument("quartic differential needs modes up to " + std::to_string(band) +
                          ", beyond the band limit at N=" + std::to_string(data.grid().n()) +
                          "; minimum N is " + std::to_string(minimum_resolution_for_band(band)));
  }
  return {data.mu() * data.nu(), band};
}

inline HiggsData gauge_act(const HiggsData& data, Complex lambda) {
  if (lambda == Complex{0.0, 0.0}) throw InvalidArgument("C* action needs a nonzero lambda");
  return HiggsData(data.mu() * lambda, data.nu() * (1.0 / lambda), data.mu_band(),
                   data.nu_band());
}

/// The pair (1, q): the representative in the fiber over q that belongs to
/// the Hitchin component.
inline HiggsData hitchin_fiber_rep(const QuarticDifferential& q) {
  if (q.vanishes_identically()) throw InvalidArgument("q ≡ 0 has no Hitchin-fiber representative");
  return HiggsData(ComplexField(q.grid(), Complex{1.0, 0.0}), q.field(), 0, q.band());
}

}  // namespace gothen
