#pragma once

// Independent reference implementations used only by tests. Everything here is
// written against raw index arithmetic so it shares no code path with the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lnls/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// Direct O(n^2) lattice transform for any half-size M (not only powers of two).
/// values are row-major with index m stored at m + M; sign = -1 forward, +1 inverse.
/// Forward scales by h^d, inverse by (2 pi)^{-d}.
inline std::vector<cplx> direct_dft(const std::vector<cplx>& values, int dim, int M, int sign) {
  const int n = 2 * M;
  const double h = kPi / M;
  std::vector<cplx> out(values.size());
  const double scale = sign < 0 ? std::pow(h, dim) : std::pow(2.0 * kPi, -dim);
  if (dim == 1) {
    for (int a = 0; a < n; ++a) {
      cplx sum = 0.0;
      for (int b = 0; b < n; ++b) {
        const double phase = sign * static_cast<double>((a - M) * (b - M)) * h;
        sum += values[b] * std::polar(1.0, phase);
      }
      out[a] = sum * scale;
    }
    return out;
  }
  for (int a0 = 0; a0 < n; ++a0)
    for (int a1 = 0; a1 < n; ++a1) {
      cplx sum = 0.0;
      for (int b0 = 0; b0 < n; ++b0)
        for (int b1 = 0; b1 < n; ++b1) {
          const double phase = sign * h * static_cast<double>((a0 - M) * (b0 - M) + (a1 - M) * (b1 - M));
          sum += values[b0 * n + b1] * std::polar(1.0, phase);
        }
      out[a0 * n + a1] = sum * scale;
    }
  return out;
}

/// (2 pi)^{-d} sum_{k'} a(k') b(k - k') with periodic wrap on the dual lattice.
inline std::vector<cplx> frequency_convolution(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim, int M) {
  const int n = 2 * M;
  const auto wrap = [n](int i) { return ((i % n) + n) % n; };
  std::vector<cplx> out(a.size());
  const double scale = std::pow(2.0 * kPi, -dim);
  if (dim == 1) {
    for (int k = 0; k < n; ++k) {
      cplx sum = 0.0;
      // slot k corresponds to frequency k - M; difference (k - M) - (j - M) lives at slot k - j + M
      for (int j = 0; j < n; ++j) sum += a[j] * b[wrap(k - j + M)];
      out[k] = sum * scale;
    }
    return out;
  }
  for (int k0 = 0; k0 < n; ++k0)
    for (int k1 = 0; k1 < n; ++k1) {
      cplx sum = 0.0;
      for (int j0 = 0; j0 < n; ++j0)
        for (int j1 = 0; j1 < n; ++j1) sum += a[j0 * n + j1] * b[wrap(k0 - j0 + M) * n + wrap(k1 - j1 + M)];
      out[k0 * n + k1] = sum * scale;
    }
  return out;
}

/// h^d sum_y u(x - y) v(y) by explicit index loops.
inline std::vector<cplx> space_convolution(const std::vector<cplx>& u, const std::vector<cplx>& v, int dim, int M) {
  const int n = 2 * M;
  const double h = kPi / M;
  const auto wrap = [n](int i) { return ((i % n) + n) % n; };
  std::vector<cplx> out(u.size());
  if (dim == 1) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) out[x] += u[wrap(x - y + M)] * v[y];
  } else {
    for (int x0 = 0; x0 < n; ++x0)
      for (int x1 = 0; x1 < n; ++x1)
        for (int y0 = 0; y0 < n; ++y0)
          for (int y1 = 0; y1 < n; ++y1)
            out[x0 * n + x1] += u[wrap(x0 - y0 + M) * n + wrap(x1 - y1 + M)] * v[y0 * n + y1];
  }
  for (auto& z : out) z *= std::pow(h, dim);
  return out;
}

inline std::vector<cplx> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> out(n);
  for (auto& z : out) z = {g(rng), g(rng)};
  return out;
}

inline lnls::GridFunction random_grid(const lnls::Lattice& lat, std::uint64_t seed) {
  return {lat, random_values(lat.size(), seed)};
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

template <class Span>
std::vector<cplx> to_vector(const Span& s) {
  return {s.begin(), s.end()};
}

/// Relative sup distance between two lattice functions.
template <class F>
double relative_gap(const F& a, const F& b) {
  const auto va = to_vector(a.values());
  const auto vb = to_vector(b.values());
  return max_abs_diff(va, vb) / std::max(max_abs(vb), 1e-300);
}

}  // namespace oracle
