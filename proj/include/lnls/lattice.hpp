#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "lnls/error.hpp"
#include "lnls/fft.hpp"

namespace lnls {

using cplx = std::complex<double>;

/// Point of the torus [-pi, pi)^d. Only the first `dim` coordinates are used.
using Point = std::array<double, 2>;

/// Integer multi-index m (lattice) or k (dual lattice), each in {-M, ..., M-1}.
using MultiIndex = std::array<int, 2>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// The periodic lattice hZ^d / 2piZ^d with h = pi/M, d in {1, 2}, M a power of two.
///
/// Storage is row-major with axis 0 slowest; index m (or frequency k) lives at
/// slot m + M along its axis. The dual lattice uses the same layout.
class Lattice {
 public:
  Lattice(int dim, int half_size) : dim_(dim), half_size_(half_size) {
    if (dim != 1 && dim != 2) throw DomainError("lattice: dimension must be 1 or 2");
    if (half_size < 1 || !fft::is_power_of_two(static_cast<std::size_t>(half_size)))
      throw DomainError("lattice: M must be a positive power of two, got " + std::to_string(half_size));
    spacing_ = std::numbers::pi / half_size;
  }

  int dim() const noexcept { return dim_; }
  int half_size() const noexcept { return half_size_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t side() const noexcept { return 2 * static_cast<std::size_t>(half_size_); }
  std::size_t size() const noexcept { return dim_ == 1 ? side() : side() * side(); }
  /// h^d, the weight of one lattice point in every L_h^r sum.
  double cell_volume() const noexcept { return std::pow(spacing_, dim_); }

  std::size_t slot(const MultiIndex& m) const noexcept {
    const auto s0 = static_cast<std::size_t>(m[0] + half_size_);
    if (dim_ == 1) return s0;
    return s0 * side() + static_cast<std::size_t>(m[1] + half_size_);
  }

  MultiIndex index(std::size_t slot) const noexcept {
    if (dim_ == 1) return {static_cast<int>(slot) - half_size_, 0};
    return {static_cast<int>(slot / side()) - half_size_, static_cast<int>(slot % side()) - half_size_};
  }

  Point point(std::size_t slot) const noexcept {
    const MultiIndex m = index(slot);
    return {spacing_ * m[0], dim_ == 2 ? spacing_ * m[1] : 0.0};
  }

  /// Wrap an arbitrary integer into {-M, ..., M-1}.
  int wrap(int m) const noexcept {
    const int n = 2 * half_size_;
    int r = (m + half_size_) % n;
    if (r < 0) r += n;
    return r - half_size_;
  }

  friend bool operator==(const Lattice& a, const Lattice& b) noexcept {
    return a.dim_ == b.dim_ && a.half_size_ == b.half_size_;
  }

 private:
  int dim_;
  int half_size_;
  double spacing_;
};

/// M with pi/M == h; rejects spacings that are not pi over a power of two.
inline int half_size_for_spacing(double h) {
  if (!(h > 0.0) || h > std::numbers::pi * (1 + 1e-12))
    throw DomainError("spacing must lie in (0, pi], got " + std::to_string(h));
  const double m = std::numbers::pi / h;
  const long rounded = std::lround(m);
  if (rounded < 1 || std::abs(m - rounded) > 1e-9 * m || !fft::is_power_of_two(static_cast<std::size_t>(rounded)))
    throw DomainError("spacing " + std::to_string(h) + " is not pi / 2^k");
  return static_cast<int>(rounded);
}

struct SpaceDomain {};
struct FrequencyDomain {};

/// Complex array indexed by a lattice (space) or its dual (frequency).
template <class Domain>
class LatticeFunction {
 public:
  explicit LatticeFunction(Lattice lattice) : lattice_(lattice), values_(lattice.size()) {}

  LatticeFunction(Lattice lattice, std::vector<cplx> values)
      : lattice_(lattice), values_(std::move(values)) {
    if (values_.size() != lattice_.size())
      throw ShapeError("lattice function: expected " + std::to_string(lattice_.size()) + " values, got " +
                       std::to_string(values_.size()));
  }

  /// Fill from f(point) (space) or f(multi-index) (frequency).
  template <class F>
  static LatticeFunction generate(const Lattice& lattice, F&& f) {
    LatticeFunction out(lattice);
    for (std::size_t s = 0; s < lattice.size(); ++s) {
      if constexpr (std::is_same_v<Domain, SpaceDomain>)
        out.values_[s] = f(lattice.point(s));
      else
        out.values_[s] = f(lattice.index(s));
    }
    return out;
  }

  const Lattice& lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx& operator[](std::size_t s) noexcept { return values_[s]; }
  const cplx& operator[](std::size_t s) const noexcept { return values_[s]; }
  cplx& at(const MultiIndex& m) noexcept { return values_[lattice_.slot(m)]; }
  const cplx& at(const MultiIndex& m) const noexcept { return values_[lattice_.slot(m)]; }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  LatticeFunction& operator+=(const LatticeFunction& o) {
    check_same(o);
    for (std::size_t s = 0; s < values_.size(); ++s) values_[s] += o.values_[s];
    return *this;
  }
  LatticeFunction& operator-=(const LatticeFunction& o) {
    check_same(o);
    for (std::size_t s = 0; s < values_.size(); ++s) values_[s] -= o.values_[s];
    return *this;
  }
  LatticeFunction& operator*=(cplx c) noexcept {
    for (auto& v : values_) v *= c;
    return *this;
  }

  friend LatticeFunction operator+(LatticeFunction a, const LatticeFunction& b) { return a += b; }
  friend LatticeFunction operator-(LatticeFunction a, const LatticeFunction& b) { return a -= b; }
  friend LatticeFunction operator*(cplx c, LatticeFunction a) { return a *= c; }

  /// Pointwise product.
  friend LatticeFunction operator*(const LatticeFunction& a, const LatticeFunction& b) {
    a.check_same(b);
    LatticeFunction out(a.lattice_);
    for (std::size_t s = 0; s < a.values_.size(); ++s) out.values_[s] = a.values_[s] * b.values_[s];
    return out;
  }

  void check_same(const LatticeFunction& o) const {
    if (!(lattice_ == o.lattice_)) throw ShapeError("lattice functions live on different lattices");
  }

 private:
  Lattice lattice_;
  std::vector<cplx> values_;
};

using GridFunction = LatticeFunction<SpaceDomain>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||u||_{L_h^r} = (h^d sum |u|^r)^{1/r}, or max |u| for r = infinity.
inline double lebesgue_norm(const GridFunction& u, double r) {
  if (!(r >= 1.0)) throw DomainError("lebesgue_norm: r >= 1 required, got " + std::to_string(r));
  const auto vals = u.values();
  if (std::isinf(r)) {
    double m = 0.0;
    for (const auto& z : vals) m = std::max(m, std::abs(z));
    return m;
  }
  double sum = 0.0;
  if (r == 2.0) {
    for (const auto& z : vals) sum += std::norm(z);
    return std::sqrt(u.lattice().cell_volume() * sum);
  }
  // Scale by the max first so large r does not overflow.
  double m = 0.0;
  for (const auto& z : vals) m = std::max(m, std::abs(z));
  if (m == 0.0) return 0.0;
  for (const auto& z : vals) sum += std::pow(std::abs(z) / m, r);
  return m * std::pow(u.lattice().cell_volume() * sum, 1.0 / r);
}

/// <u, v> = h^d sum u conj(v).
inline cplx inner_product(const GridFunction& u, const GridFunction& v) {
  u.check_same(v);
  cplx sum = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) sum += u[s] * std::conj(v[s]);
  return u.lattice().cell_volume() * sum;
}

struct HolderPair {
  double lhs;  ///< ||uv||_{L^r}
  double rhs;  ///< ||u||_{L^p} ||v||_{L^q}
};

/// Both sides of Hoelder's inequality. Exponents may be kInfinity.
inline HolderPair holder_check(const GridFunction& u, const GridFunction& v, double p, double q, double r) {
  u.check_same(v);
  const auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
  if (std::abs(inv(p) + inv(q) - inv(r)) > 1e-12)
    throw DomainError("holder_check: 1/p + 1/q = 1/r required");
  return {lebesgue_norm(u * v, r), lebesgue_norm(u, p) * lebesgue_norm(v, q)};
}

/// (u * v)(x) = h^d sum_y u(x - y) v(y), by direct summation (O(n^2)).
inline GridFunction convolve(const GridFunction& u, const GridFunction& v) {
  u.check_same(v);
  const Lattice& lat = u.lattice();
  GridFunction out(lat);
  for (std::size_t xs = 0; xs < lat.size(); ++xs) {
    const MultiIndex x = lat.index(xs);
    cplx sum = 0.0;
    for (std::size_t ys = 0; ys < lat.size(); ++ys) {
      if (v[ys] == cplx{}) continue;
      const MultiIndex y = lat.index(ys);
      const MultiIndex diff = {lat.wrap(x[0] - y[0]), lat.dim() == 2 ? lat.wrap(x[1] - y[1]) : 0};
      sum += u.at(diff) * v[ys];
    }
    out[xs] = lat.cell_volume() * sum;
  }
  return out;
}

namespace detail {

// Value of u at x + shift * e_axis, periodic.
inline GridFunction shifted(const GridFunction& u, int axis, int shift) {
  const Lattice& lat = u.lattice();
  GridFunction out(lat);
  for (std::size_t s = 0; s < lat.size(); ++s) {
    MultiIndex m = lat.index(s);
    m[axis] = lat.wrap(m[axis] + shift);
    out[s] = u.at(m);
  }
  return out;
}

inline void check_axis(const Lattice& lat, int axis) {
  if (axis < 0 || axis >= lat.dim())
    throw DomainError("axis " + std::to_string(axis) + " out of range for d = " + std::to_string(lat.dim()));
}

}  // namespace detail

/// D_{h,j}^+ u(x) = (u(x + h e_j) - u(x)) / h. Axes are 0-based.
inline GridFunction forward_difference(const GridFunction& u, int axis) {
  detail::check_axis(u.lattice(), axis);
  GridFunction out = detail::shifted(u, axis, +1) - u;
  out *= 1.0 / u.lattice().spacing();
  return out;
}

/// D_{h,j}^- u(x) = (u(x) - u(x - h e_j)) / h; the negative adjoint of D^+.
inline GridFunction backward_difference(const GridFunction& u, int axis) {
  detail::check_axis(u.lattice(), axis);
  GridFunction out = u - detail::shifted(u, axis, -1);
  out *= 1.0 / u.lattice().spacing();
  return out;
}

/// ||D_h^+ u||_{L_h^2} over all axes.
inline double forward_gradient_norm(const GridFunction& u) {
  double sum = 0.0;
  for (int j = 0; j < u.lattice().dim(); ++j) {
    const double n = lebesgue_norm(forward_difference(u, j), 2.0);
    sum += n * n;
  }
  return std::sqrt(sum);
}

/// Five-point (d = 2) / three-point (d = 1) periodic Laplacian.
inline GridFunction discrete_laplacian_stencil(const GridFunction& u) {
  const Lattice& lat = u.lattice();
  const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
  GridFunction out(lat);
  const std::size_t n = lat.side();
  const auto in = u.values();
  auto res = out.values();
  if (lat.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i)
      res[i] = (in[(i + 1) % n] + in[(i + n - 1) % n] - 2.0 * in[i]) * inv_h2;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
      const cplx c = in[i * n + j];
      res[i * n + j] = (in[ip * n + j] + in[im * n + j] + in[i * n + jp] + in[i * n + jm] - 4.0 * c) * inv_h2;
    }
  }
  return out;
}

}  // namespace lnls
