#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "lnls/error.hpp"
#include "lnls/fft.hpp"
#include "lnls/lattice.hpp"
#include "lnls/spectral.hpp"

namespace lnls {

/// A function on the torus T^d = (R / 2 pi Z)^d that can be evaluated anywhere.
class ContinuumSampler {
 public:
  virtual ~ContinuumSampler() = default;

  virtual int dim() const noexcept = 0;
  virtual cplx operator()(const Point& x) const = 0;
  virtual std::string tag() const { return "sampler"; }

  /// Values on the regular grid x_j = -pi + (j + offset) 2 pi / n per axis,
  /// row-major with axis 0 slowest. `offset` is in cell units, 0 <= offset < 1.
  virtual std::vector<cplx> sample_grid(std::size_t n, double offset) const {
    const int d = dim();
    const double step = kTwoPi / static_cast<double>(n);
    const std::size_t total = d == 1 ? n : n * n;
    std::vector<cplx> out(total);
    for (std::size_t s = 0; s < total; ++s) {
      const std::size_t i = d == 1 ? s : s / n;
      const std::size_t j = d == 1 ? 0 : s % n;
      const Point x = {-std::numbers::pi + (static_cast<double>(i) + offset) * step,
                       d == 1 ? 0.0 : -std::numbers::pi + (static_cast<double>(j) + offset) * step};
      out[s] = (*this)(x);
    }
    return out;
  }
};

using Sampler = std::shared_ptr<const ContinuumSampler>;

/// Sampler backed by a callable. Periodicity is the caller's responsibility.
class FunctionSampler final : public ContinuumSampler {
 public:
  using Fn = std::function<cplx(const Point&)>;
  FunctionSampler(int dim, Fn fn, std::string tag) : dim_(dim), fn_(std::move(fn)), tag_(std::move(tag)) {
    if (dim != 1 && dim != 2) throw DomainError("sampler: dimension must be 1 or 2");
  }
  int dim() const noexcept override { return dim_; }
  cplx operator()(const Point& x) const override { return fn_(x); }
  std::string tag() const override { return tag_; }

 private:
  int dim_;
  Fn fn_;
  std::string tag_;
};

inline Sampler make_sampler(int dim, FunctionSampler::Fn fn, std::string tag) {
  return std::make_shared<FunctionSampler>(dim, std::move(fn), std::move(tag));
}

/// Trigonometric interpolant of samples on a fine lattice (h = 2 pi / R).
///
/// The fine grid is an ordinary Lattice with M = R / 2, so the coefficients are
/// exactly its lattice Fourier transform: f(x) = (2 pi)^{-d} sum_k c(k) e^{i k.x}.
class TrigSampler final : public ContinuumSampler {
 public:
  explicit TrigSampler(const GridFunction& samples, std::string tag = "trig")
      : coefficients_(forward(samples)), tag_(std::move(tag)) {}
  TrigSampler(SpectrumFunction coefficients, std::string tag)
      : coefficients_(std::move(coefficients)), tag_(std::move(tag)) {}

  int dim() const noexcept override { return coefficients_.lattice().dim(); }
  std::string tag() const override { return tag_; }
  const SpectrumFunction& coefficients() const noexcept { return coefficients_; }
  std::size_t resolution() const noexcept { return coefficients_.lattice().side(); }

  cplx operator()(const Point& x) const override {
    const Lattice& lat = coefficients_.lattice();
    const int d = lat.dim();
    const int half = lat.half_size();
    // Per-axis exponentials, then a tensor sum.
    std::vector<cplx> e0(lat.side()), e1(d == 2 ? lat.side() : 0);
    for (int k = -half; k < half; ++k) {
      e0[k + half] = std::polar(1.0, k * x[0]);
      if (d == 2) e1[k + half] = std::polar(1.0, k * x[1]);
    }
    cplx sum = 0.0;
    if (d == 1) {
      for (std::size_t s = 0; s < lat.side(); ++s) sum += coefficients_[s] * e0[s];
    } else {
      const std::size_t n = lat.side();
      for (std::size_t i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += coefficients_[i * n + j] * e1[j];
        sum += row * e0[i];
      }
    }
    return sum / std::pow(kTwoPi, d);
  }

  // Fold coefficients with the grid phase into n bins and run one inverse FFT.
  // Exact at the target points for any n (aliasing is accounted for by the fold).
  std::vector<cplx> sample_grid(std::size_t n, double offset) const override {
    if (!fft::is_power_of_two(n)) return ContinuumSampler::sample_grid(n, offset);
    const Lattice& lat = coefficients_.lattice();
    const int d = lat.dim();
    const int half = lat.half_size();
    const double base = -std::numbers::pi + offset * kTwoPi / static_cast<double>(n);
    const auto bin = [n](int k) {
      const auto nn = static_cast<long>(n);
      return static_cast<std::size_t>(((k % nn) + nn) % nn);
    };
    std::vector<cplx> phase(lat.side());
    for (int k = -half; k < half; ++k) phase[k + half] = std::polar(1.0, k * base);

    std::vector<cplx> bins(d == 1 ? n : n * n);
    const double scale = 1.0 / std::pow(kTwoPi, d);
    for (std::size_t s = 0; s < coefficients_.size(); ++s) {
      const MultiIndex k = lat.index(s);
      if (d == 1) {
        bins[bin(k[0])] += coefficients_[s] * phase[k[0] + half] * scale;
      } else {
        bins[bin(k[0]) * n + bin(k[1])] += coefficients_[s] * phase[k[0] + half] * phase[k[1] + half] * scale;
      }
    }
    fft::transform_cube(bins, d, n, +1);
    return bins;
  }

 private:
  SpectrumFunction coefficients_;
  std::string tag_;
};

/// p_h u: on each cell x + [0, h)^d, u(x) + sum_j D_{h,j}^+ u(x) (y_j - x_j).
/// Affine per cell, so in d = 2 it may jump across cell faces.
class InterpolantSampler final : public ContinuumSampler {
 public:
  explicit InterpolantSampler(GridFunction u) : u_(std::move(u)) {
    for (int j = 0; j < u_.lattice().dim(); ++j) slopes_.push_back(forward_difference(u_, j));
  }

  int dim() const noexcept override { return u_.lattice().dim(); }
  std::string tag() const override { return "interpolant"; }
  const GridFunction& grid() const noexcept { return u_; }
  const std::vector<GridFunction>& slopes() const noexcept { return slopes_; }

  cplx operator()(const Point& x) const override {
    const Lattice& lat = u_.lattice();
    const double h = lat.spacing();
    MultiIndex cell{0, 0};
    Point offset{0.0, 0.0};
    for (int j = 0; j < lat.dim(); ++j) {
      double y = std::fmod(x[j] + std::numbers::pi, kTwoPi);
      if (y < 0) y += kTwoPi;
      // Snap to the node when rounding leaves y a hair below it; otherwise a
      // lattice point could be evaluated from a diagonal neighbour's cell in d = 2.
      const double r = y / h;
      int m = static_cast<int>(std::floor(r));
      if (r - m > 1.0 - 1e-9) ++m;
      if (m >= 2 * lat.half_size()) m -= 2 * lat.half_size();
      offset[j] = std::max(0.0, y - m * h);
      if (m == 0 && y > std::numbers::pi) offset[j] = 0.0;
      cell[j] = m - lat.half_size();
    }
    const std::size_t s = lat.slot(cell);
    cplx v = u_[s];
    for (int j = 0; j < lat.dim(); ++j) v += slopes_[j][s] * offset[j];
    return v;
  }

 private:
  GridFunction u_;
  std::vector<GridFunction> slopes_;
};

inline Sampler interpolate(const GridFunction& u) { return std::make_shared<InterpolantSampler>(u); }

/// Nodes and weights of the 8-point Gauss-Legendre rule mapped to [0, 1].
inline std::pair<std::array<double, 8>, std::array<double, 8>> unit_gauss_legendre() {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  std::array<double, 8> x{}, w{};
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    x[i] = 0.5 * (1.0 - abscissa[i]);
    x[7 - i] = 0.5 * (1.0 + abscissa[i]);
    w[i] = w[7 - i] = 0.5 * weights[i];
  }
  return {x, w};
}

/// d_h f(x) = h^{-d} int_{x + [0,h)^d} f, by tensor Gauss-Legendre (8 nodes per axis).
/// Oscillation beyond what 8 nodes per cell resolve is not detected.
inline GridFunction discretize(const ContinuumSampler& f, const Lattice& lat) {
  if (f.dim() != lat.dim()) throw ShapeError("discretize: sampler and lattice dimensions differ");
  const auto [nodes, weights] = unit_gauss_legendre();
  const double h = lat.spacing();
  GridFunction out(lat);
  for (std::size_t s = 0; s < lat.size(); ++s) {
    const Point base = lat.point(s);
    cplx sum = 0.0;
    if (lat.dim() == 1) {
      for (int a = 0; a < 8; ++a) sum += weights[a] * f({base[0] + h * nodes[a], 0.0});
    } else {
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
          sum += weights[a] * weights[b] * f({base[0] + h * nodes[a], base[1] + h * nodes[b]});
    }
    out[s] = sum;
  }
  return out;
}

inline GridFunction discretize(const Sampler& f, const Lattice& lat) { return discretize(*f, lat); }

/// Midpoint-rule L^2(T^d) distance on an n^d grid of cell centres.
inline double l2_distance(const ContinuumSampler& a, const ContinuumSampler& b, std::size_t n) {
  if (a.dim() != b.dim()) throw ShapeError("l2_distance: dimension mismatch");
  const auto va = a.sample_grid(n, 0.5);
  const auto vb = b.sample_grid(n, 0.5);
  double sum = 0.0;
  for (std::size_t s = 0; s < va.size(); ++s) sum += std::norm(va[s] - vb[s]);
  return std::sqrt(sum * std::pow(kTwoPi / static_cast<double>(n), a.dim()));
}

inline double l2_norm(const ContinuumSampler& a, std::size_t n) {
  const auto va = a.sample_grid(n, 0.5);
  double sum = 0.0;
  for (const auto& v : va) sum += std::norm(v);
  return std::sqrt(sum * std::pow(kTwoPi / static_cast<double>(n), a.dim()));
}

inline constexpr int kDefaultOversample = 8;

/// ||p_h u - f||_{L^2(T^d)} on the refined grid of spacing h / oversample.
/// Sample points are sub-cell centres, so each lattice cell is integrated on its own.
inline double continuum_l2_error(const GridFunction& u, const ContinuumSampler& f,
                                 int oversample = kDefaultOversample) {
  if (oversample < 4) throw DomainError("continuum_l2_error: oversample >= 4 required");
  const InterpolantSampler ph(u);
  return l2_distance(ph, f, u.lattice().side() * static_cast<std::size_t>(oversample));
}

/// ||f||_{H^s(T^d)} from the trigonometric interpolant on an R^d grid.
inline double continuum_sobolev_norm(const ContinuumSampler& f, double s, std::size_t resolution = 256) {
  const Lattice fine(f.dim(), static_cast<int>(resolution / 2));
  GridFunction samples(fine, f.sample_grid(resolution, 0.0));
  return sobolev_norm(samples, s);
}

/// Exact ||p_h u||_{L^2(T^d)}: the interpolant is affine on each cell.
inline double interpolant_l2_norm(const GridFunction& u) {
  const Lattice& lat = u.lattice();
  const double h = lat.spacing();
  std::vector<GridFunction> b;
  for (int j = 0; j < lat.dim(); ++j) b.push_back(forward_difference(u, j));
  double sum = 0.0;
  for (std::size_t s = 0; s < lat.size(); ++s) {
    const cplx a = u[s];
    double cell = std::norm(a);
    for (int j = 0; j < lat.dim(); ++j) {
      cell += std::real(a * std::conj(b[j][s])) * h + std::norm(b[j][s]) * h * h / 3.0;
    }
    if (lat.dim() == 2) cell += std::real(b[0][s] * std::conj(b[1][s])) * h * h / 2.0;
    sum += cell;
  }
  return std::sqrt(lat.cell_volume() * sum);
}

/// Broken H^1 norm of p_h u: exact cellwise L^2 plus the cellwise gradient,
/// ignoring face jumps (p_h u is not in H^1 across faces when d = 2).
inline double interpolant_broken_h1_norm(const GridFunction& u) {
  const double l2 = interpolant_l2_norm(u);
  const double grad = forward_gradient_norm(u);
  return std::sqrt(l2 * l2 + grad * grad);
}

// ---------------------------------------------------------------------------
// Continuum profiles used as initial data and test corpora.

/// A e^{i k0.x}.
inline Sampler plane_wave(int dim, MultiIndex k0, cplx amplitude = 1.0) {
  return make_sampler(
      dim,
      [=](const Point& x) {
        const double phase = k0[0] * x[0] + (dim == 2 ? k0[1] * x[1] : 0.0);
        return amplitude * std::polar(1.0, phase);
      },
      "plane_wave");
}

/// Periodised Gaussian amplitude * sum_n exp(-|x - c + 2 pi n|^2 / (2 w^2)), |n_j| <= 3.
inline Sampler wrapped_gaussian(int dim, Point center, double width, cplx amplitude = 1.0, MultiIndex carrier = {0, 0}) {
  return make_sampler(
      dim,
      [=](const Point& x) {
        const auto axis = [&](int j) {
          double s = 0.0;
          for (int n = -3; n <= 3; ++n) {
            const double y = x[j] - center[j] + kTwoPi * n;
            s += std::exp(-y * y / (2.0 * width * width));
          }
          return s;
        };
        double v = axis(0);
        if (dim == 2) v *= axis(1);
        const double phase = carrier[0] * x[0] + (dim == 2 ? carrier[1] * x[1] : 0.0);
        return amplitude * v * std::polar(1.0, phase);
      },
      "wrapped_gaussian");
}

/// Sum of `count` distinct random low modes (|k_j| <= max_frequency) with random
/// complex amplitudes, normalised to ||f||_{H^1} = norm.
inline Sampler random_modes(int dim, int count, int max_frequency, std::uint64_t seed, double norm = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-max_frequency, max_frequency);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::set<MultiIndex> used;
  std::vector<std::pair<MultiIndex, cplx>> modes;
  const int available = dim == 1 ? 2 * max_frequency + 1 : (2 * max_frequency + 1) * (2 * max_frequency + 1);
  if (count > available) throw DomainError("random_modes: more modes requested than available frequencies");
  while (static_cast<int>(modes.size()) < count) {
    const MultiIndex k{freq(rng), dim == 2 ? freq(rng) : 0};
    if (!used.insert(k).second) continue;
    modes.emplace_back(k, cplx(gauss(rng), gauss(rng)));
  }
  double h1 = 0.0;
  for (const auto& [k, c] : modes) h1 += (1.0 + frequency_norm_squared(k, dim)) * std::norm(c);
  const double scale = norm / std::sqrt(std::pow(kTwoPi, dim) * h1);
  for (auto& m : modes) m.second *= scale;
  return make_sampler(
      dim,
      [dim, modes](const Point& x) {
        cplx v = 0.0;
        for (const auto& [k, c] : modes) v += c * std::polar(1.0, k[0] * x[0] + (dim == 2 ? k[1] * x[1] : 0.0));
        return v;
      },
      "random_modes");
}

}  // namespace lnls
