#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lnls/error.hpp"
#include "lnls/fft.hpp"
#include "lnls/lattice.hpp"

// Fourier calculus on the periodic lattice:
//   forward:  u^(k) = h^d sum_x u(x) e^{-i k.x}
//   inverse:  u(x)  = (2 pi)^{-d} sum_k u^(k) e^{i k.x}
// with k in {-M, ..., M-1}^d stored at slot k + M (same layout as space).
namespace lnls {

using SpectrumFunction = LatticeFunction<FrequencyDomain>;

/// Slot (k + M, or m + M) to the standard FFT bin (k mod 2M).
inline constexpr std::size_t slot_to_bin(std::size_t slot, std::size_t half_size) noexcept {
  return (slot + half_size) % (2 * half_size);
}

/// Standard FFT bin to slot; inverse of slot_to_bin.
inline constexpr std::size_t bin_to_slot(std::size_t bin, std::size_t half_size) noexcept {
  return (bin + half_size) % (2 * half_size);
}

namespace detail {

// Gather lattice-ordered values into FFT order (to_bins) or scatter back.
inline void permute_cube(std::span<const cplx> in, std::span<cplx> out, const Lattice& lat, bool to_bins) {
  const std::size_t n = lat.side();
  const std::size_t half = static_cast<std::size_t>(lat.half_size());
  const auto map = [&](std::size_t i) { return to_bins ? slot_to_bin(i, half) : bin_to_slot(i, half); };
  if (lat.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[map(i)] = in[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t mi = map(i) * n;
    for (std::size_t j = 0; j < n; ++j) out[mi + map(j)] = in[i * n + j];
  }
}

inline std::vector<cplx> lattice_fft(std::span<const cplx> in, const Lattice& lat, int sign) {
  std::vector<cplx> buffer(in.size());
  permute_cube(in, buffer, lat, true);
  fft::transform_cube(buffer, lat.dim(), lat.side(), sign);
  std::vector<cplx> out(in.size());
  permute_cube(buffer, out, lat, false);
  return out;
}

}  // namespace detail

inline SpectrumFunction forward(const GridFunction& u) {
  const Lattice& lat = u.lattice();
  SpectrumFunction out(lat, detail::lattice_fft(u.values(), lat, -1));
  out *= lat.cell_volume();
  return out;
}

inline GridFunction inverse(const SpectrumFunction& spectrum) {
  const Lattice& lat = spectrum.lattice();
  GridFunction out(lat, detail::lattice_fft(spectrum.values(), lat, +1));
  out *= 1.0 / std::pow(kTwoPi, lat.dim());
  return out;
}

/// |k|^2 for a dual-lattice index.
inline double frequency_norm_squared(const MultiIndex& k, int dim) noexcept {
  double s = static_cast<double>(k[0]) * k[0];
  if (dim == 2) s += static_cast<double>(k[1]) * k[1];
  return s;
}

/// <k> = (1 + |k|^2)^{1/2}.
inline double japanese_bracket(const MultiIndex& k, int dim) noexcept {
  return std::sqrt(1.0 + frequency_norm_squared(k, dim));
}

/// Diagonal operator in frequency: (m u)^(k) = symbol(k) u^(k).
class Multiplier {
 public:
  Multiplier(SpectrumFunction symbol, std::string tag) : symbol_(std::move(symbol)), tag_(std::move(tag)) {}

  template <class F>
  static Multiplier from_symbol(const Lattice& lat, F&& f, std::string tag) {
    return {SpectrumFunction::generate(lat, std::forward<F>(f)), std::move(tag)};
  }

  static Multiplier constant(const Lattice& lat, cplx c) {
    return from_symbol(lat, [c](const MultiIndex&) { return c; }, "constant");
  }

  const Lattice& lattice() const noexcept { return symbol_.lattice(); }
  const SpectrumFunction& symbol() const noexcept { return symbol_; }
  const std::string& tag() const noexcept { return tag_; }

  /// Composition of diagonal operators is the pointwise product of symbols.
  friend Multiplier compose(const Multiplier& a, const Multiplier& b) {
    return {a.symbol_ * b.symbol_, a.tag_ + "*" + b.tag_};
  }

 private:
  SpectrumFunction symbol_;
  std::string tag_;
};

/// sigma_h(k) = sum_j (4/h^2) sin^2(h k_j / 2) at one frequency; the symbol of -Delta_h.
inline double laplacian_symbol_value(const MultiIndex& k, int dim, double h) noexcept {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double sn = std::sin(0.5 * h * k[j]);
    s += 4.0 / (h * h) * sn * sn;
  }
  return s;
}

/// Symbol of -Delta_h (real, nonnegative).
inline Multiplier laplacian_symbol(const Lattice& lat) {
  return Multiplier::from_symbol(
      lat, [&](const MultiIndex& k) { return cplx(laplacian_symbol_value(k, lat.dim(), lat.spacing())); },
      "minus_laplacian");
}

inline SpectrumFunction apply_in_frequency(const Multiplier& m, SpectrumFunction spectrum) {
  m.symbol().check_same(spectrum);
  const auto sym = m.symbol().values();
  auto vals = spectrum.values();
  for (std::size_t s = 0; s < vals.size(); ++s) vals[s] *= sym[s];
  return spectrum;
}

inline GridFunction apply_multiplier(const Multiplier& m, const GridFunction& u) {
  if (!(m.lattice() == u.lattice())) throw ShapeError("apply_multiplier: multiplier and function lattices differ");
  return inverse(apply_in_frequency(m, forward(u)));
}

/// <grad_h>^s: multiplier with symbol <k>^s.
inline Multiplier bracket_multiplier(const Lattice& lat, double s) {
  return Multiplier::from_symbol(
      lat, [&](const MultiIndex& k) { return cplx(std::pow(japanese_bracket(k, lat.dim()), s)); },
      "bracket^" + std::to_string(s));
}

inline GridFunction fractional_derivative(const GridFunction& u, double s) {
  return apply_multiplier(bracket_multiplier(u.lattice(), s), u);
}

/// ((2 pi)^{-d} sum_k w(k) |u^(k)|^2)^{1/2}.
template <class Weight>
double weighted_spectral_norm(const SpectrumFunction& spectrum, Weight&& weight) {
  const Lattice& lat = spectrum.lattice();
  double sum = 0.0;
  for (std::size_t s = 0; s < spectrum.size(); ++s) sum += weight(lat.index(s)) * std::norm(spectrum[s]);
  return std::sqrt(sum / std::pow(kTwoPi, lat.dim()));
}

/// ||u||_{H_h^s} with weight <k>^{2s}.
inline double sobolev_norm(const GridFunction& u, double s) {
  const int d = u.lattice().dim();
  return weighted_spectral_norm(forward(u), [&](const MultiIndex& k) {
    return std::pow(1.0 + frequency_norm_squared(k, d), s);
  });
}

/// Dyadic frequency scale N = 2^level with N_* <= N <= 1.
///
/// N_* = 2^{ceil(log2(h/pi)) - 1}; for h = pi/M with M = 2^m this is 2^{-m-1},
/// which is what lowest_level() returns (exactly, without a floating ceil).
class DyadicScale {
 public:
  DyadicScale(const Lattice& lat, int level) : half_size_(lat.half_size()), level_(level) {
    if (level < lowest_level(lat) || level > 0)
      throw DomainError("dyadic scale: level " + std::to_string(level) + " outside [" +
                        std::to_string(lowest_level(lat)) + ", 0]");
  }

  static int lowest_level(const Lattice& lat) noexcept {
    int m = 0;
    while ((1 << m) < lat.half_size()) ++m;
    return -m - 1;
  }

  static DyadicScale lowest(const Lattice& lat) { return {lat, lowest_level(lat)}; }

  /// N_*, 2N_*, ..., 1.
  static std::vector<DyadicScale> all(const Lattice& lat) {
    std::vector<DyadicScale> out;
    for (int l = lowest_level(lat); l <= 0; ++l) out.emplace_back(lat, l);
    return out;
  }

  int level() const noexcept { return level_; }
  double value() const noexcept { return std::ldexp(1.0, level_); }
  bool is_lowest() const noexcept {
    int m = 0;
    while ((1 << m) < half_size_) ++m;
    return level_ == -m - 1;
  }
  /// pi N / h = N M, the outer radius (in max-norm) of the annulus.
  double frequency_radius() const noexcept { return value() * half_size_; }

 private:
  int half_size_;
  int level_;
};

/// Whether k lies in the support of P_N.
inline bool in_annulus(const MultiIndex& k, int dim, const DyadicScale& scale) noexcept {
  const int kmax = dim == 2 ? std::max(std::abs(k[0]), std::abs(k[1])) : std::abs(k[0]);
  if (scale.is_lowest()) return kmax == 0;
  const double outer = scale.frequency_radius();
  return 0.5 * outer < kmax && kmax <= outer;
}

/// Frequency restriction with a boolean mask over the dual lattice.
template <class Keep>
GridFunction frequency_restrict(const GridFunction& u, Keep&& keep) {
  SpectrumFunction spec = forward(u);
  const Lattice& lat = u.lattice();
  for (std::size_t s = 0; s < spec.size(); ++s)
    if (!keep(lat.index(s))) spec[s] = 0.0;
  return inverse(spec);
}

/// Littlewood-Paley piece P_N u. For N = N_* this is the constant (2 pi)^{-d} u^(0),
/// i.e. the zero-mode projection, so the pieces over all N sum to u.
inline GridFunction lp_project(const GridFunction& u, const DyadicScale& scale) {
  const int d = u.lattice().dim();
  return frequency_restrict(u, [&](const MultiIndex& k) { return in_annulus(k, d, scale); });
}

/// P_{<=N} u: keep max_j |k_j| <= pi N / h.
inline GridFunction lp_project_low(const GridFunction& u, const DyadicScale& scale) {
  const int d = u.lattice().dim();
  const double outer = scale.frequency_radius();
  return frequency_restrict(u, [&](const MultiIndex& k) {
    const int kmax = d == 2 ? std::max(std::abs(k[0]), std::abs(k[1])) : std::abs(k[0]);
    return kmax <= outer;
  });
}

}  // namespace lnls
