#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lnls/dynamics.hpp"
#include "lnls/error.hpp"
#include "lnls/fft.hpp"
#include "lnls/lattice.hpp"
#include "lnls/sampler.hpp"
#include "lnls/spectral.hpp"

// Continuum NLS on T^d by Fourier collocation with Strang splitting.
namespace lnls {

struct ReferenceOptions {
  std::size_t resolution = 512;   ///< collocation points per axis (power of two)
  double dt = 1e-3;
  double self_convergence_tol = 1e-6;  ///< relative L^2 gap allowed between R and 2R
  bool certify = true;
};

using TrigHandle = std::shared_ptr<const TrigSampler>;

/// ||f - g||_{L^2(T^d)} for two trigonometric polynomials, by Parseval on their coefficients.
inline double trig_l2_distance(const TrigSampler& a, const TrigSampler& b) {
  if (a.dim() != b.dim()) throw ShapeError("trig_l2_distance: dimensions differ");
  const TrigSampler& big = a.resolution() >= b.resolution() ? a : b;
  const TrigSampler& small = a.resolution() >= b.resolution() ? b : a;
  const Lattice& lb = big.coefficients().lattice();
  const Lattice& ls = small.coefficients().lattice();
  const int hs = ls.half_size();
  double sum = 0.0;
  for (std::size_t s = 0; s < lb.size(); ++s) {
    const MultiIndex k = lb.index(s);
    bool inside = k[0] >= -hs && k[0] < hs;
    if (lb.dim() == 2) inside = inside && k[1] >= -hs && k[1] < hs;
    const cplx other = inside ? small.coefficients().at(k) : cplx(0.0);
    sum += std::norm(big.coefficients()[s] - other);
  }
  return std::sqrt(sum / std::pow(kTwoPi, lb.dim()));
}

inline double trig_l2_norm(const TrigSampler& a) {
  return weighted_spectral_norm(a.coefficients(), [](const MultiIndex&) { return 1.0; });
}

/// Collocation solver on (R/2)-lattice with exact symbol |k|^2. Odd-integer p uses
/// the 2/3 dealiasing rule after each step; other p run on a doubled grid instead.
class SpectralNlsSolver {
 public:
  SpectralNlsSolver(int dim, std::size_t resolution, NlsParams params, double dt)
      : dim_(dim), resolution_(resolution), params_(params), dt_(dt) {
    params_.validate();
    if (!fft::is_power_of_two(resolution) || resolution < 8)
      throw DomainError("reference: resolution must be a power of two >= 8");
    if (dim == 2 && resolution < 256) throw DomainError("reference: d = 2 needs resolution >= 256");
    if (!(dt > 0.0)) throw DomainError("reference: dt > 0 required");
  }

  bool dealiased() const noexcept {
    const double p = params_.p;
    return params_.free || (p == std::round(p) && static_cast<long>(p) % 2 == 1);
  }

  std::size_t grid_size() const noexcept { return dealiased() ? resolution_ : 2 * resolution_; }

  /// Solutions at each nondecreasing time in `times`.
  std::vector<TrigHandle> solve(const ContinuumSampler& u0, const std::vector<double>& times) const {
    if (u0.dim() != dim_) throw ShapeError("reference: initial data dimension mismatch");
    const std::size_t n = grid_size();
    const Lattice lat(dim_, static_cast<int>(n / 2));
    GridFunction u(lat, u0.sample_grid(n, 0.0));
    std::vector<TrigHandle> out;
    if (params_.free) {
      const SpectrumFunction c = forward(u);
      for (double t : times) out.push_back(std::make_shared<TrigSampler>(exact_linear(c, t), "reference"));
      return out;
    }
    const double cut = static_cast<double>(n) / 3.0;
    double now = 0.0;
    for (double t : times) {
      if (t < now) throw DomainError("reference: times must be nondecreasing and >= 0");
      const int steps = detail::step_count(t - now, dt_);
      if (steps > 0) {
        const double dt = (t - now) / steps;
        const Multiplier linear = Multiplier::from_symbol(
            lat,
            [&](const MultiIndex& k) {
              if (dealiased() && (std::abs(k[0]) > cut || (dim_ == 2 && std::abs(k[1]) > cut))) return cplx(0.0);
              return std::polar(1.0, -dt * frequency_norm_squared(k, dim_));
            },
            "reference_linear");
        for (int s = 0; s < steps; ++s) {
          u = nonlinear_phase_step(u, params_, 0.5 * dt);
          u = inverse(apply_in_frequency(linear, forward(u)));
          u = nonlinear_phase_step(u, params_, 0.5 * dt);
        }
        if (!u.all_finite()) throw NumericalError("reference: non-finite state");
      }
      now = t;
      out.push_back(std::make_shared<TrigSampler>(forward(u), "reference"));
    }
    return out;
  }

 private:
  SpectrumFunction exact_linear(SpectrumFunction c, double t) const {
    const Lattice& lat = c.lattice();
    for (std::size_t s = 0; s < c.size(); ++s)
      c[s] *= std::polar(1.0, -t * frequency_norm_squared(lat.index(s), dim_));
    return c;
  }

  int dim_;
  std::size_t resolution_;
  NlsParams params_;
  double dt_;
};

struct ReferenceRun {
  std::vector<TrigHandle> solutions;
  /// max over times of ||ref_R - ref_2R|| / ||ref_2R|| (0 when not certified).
  double self_convergence = 0.0;
  /// max over times of ||ref_R - ref_2R|| in absolute terms.
  double absolute_gap = 0.0;
};

/// Reference solutions at `times`; with opts.certify the run is repeated at 2R and
/// AccuracyError is thrown when the relative gap exceeds opts.self_convergence_tol.
inline ReferenceRun reference_solutions(const ContinuumSampler& u0, const NlsParams& params,
                                        const std::vector<double>& times, const ReferenceOptions& opts = {}) {
  SpectralNlsSolver coarse(u0.dim(), opts.resolution, params, opts.dt);
  ReferenceRun run{coarse.solve(u0, times), 0.0, 0.0};
  if (!opts.certify) return run;
  SpectralNlsSolver fine(u0.dim(), 2 * opts.resolution, params, opts.dt);
  const auto check = fine.solve(u0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double gap = trig_l2_distance(*run.solutions[i], *check[i]);
    const double scale = std::max(trig_l2_norm(*check[i]), 1e-300);
    run.absolute_gap = std::max(run.absolute_gap, gap);
    run.self_convergence = std::max(run.self_convergence, gap / scale);
  }
  if (run.self_convergence > opts.self_convergence_tol)
    throw AccuracyError("reference: self-convergence gap " + std::to_string(run.self_convergence) +
                        " exceeds tolerance " + std::to_string(opts.self_convergence_tol) +
                        "; raise the resolution");
  return run;
}

inline TrigHandle reference_solution(const ContinuumSampler& u0, const NlsParams& params, double t,
                                     const ReferenceOptions& opts = {}) {
  return reference_solutions(u0, params, {t}, opts).solutions.front();
}

}  // namespace lnls
