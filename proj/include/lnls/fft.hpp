#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lnls/error.hpp"

// Radix-2 complex FFT on power-of-two lengths, plus the row-major cube
// variant used for d = 1, 2 lattices. Transforms are unnormalised.
namespace lnls::fft {

using cplx = std::complex<double>;

inline constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

namespace detail {

// Plain multiply; std::complex operator* goes through the Annex G NaN path.
inline cplx mul(cplx a, cplx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

// exp(-2 pi i j / n), j < n/2, each entry from cos/sin directly.
inline const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto [it, inserted] = cache.try_emplace(n);
  if (inserted) {
    auto& w = it->second;
    w.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      w[j] = {std::cos(angle), std::sin(angle)};
    }
  }
  return it->second;
}

}  // namespace detail

/// In-place DFT: a[b] <- sum_n a[n] exp(sign * 2 pi i b n / N). sign = -1 is forward.
inline void transform(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!is_power_of_two(n)) throw DomainError("fft: length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto& w = detail::twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx tw = w[k * stride];
        if (sign > 0) tw = std::conj(tw);
        const cplx v = detail::mul(a[start + k + half], tw);
        const cplx u = a[start + k];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

/// Transform every axis of a row-major cube with `dim` axes of length `side`.
inline void transform_cube(std::span<cplx> a, int dim, std::size_t side, int sign) {
  if (dim == 1) {
    transform(a, sign);
    return;
  }
  if (dim != 2 || a.size() != side * side) throw ShapeError("fft: cube shape mismatch");
  for (std::size_t row = 0; row < side; ++row) transform(a.subspan(row * side, side), sign);
  std::vector<cplx> column(side);
  for (std::size_t col = 0; col < side; ++col) {
    for (std::size_t row = 0; row < side; ++row) column[row] = a[row * side + col];
    transform(column, sign);
    for (std::size_t row = 0; row < side; ++row) a[row * side + col] = column[row];
  }
}

}  // namespace lnls::fft
