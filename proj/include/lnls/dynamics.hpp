#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lnls/error.hpp"
#include "lnls/lattice.hpp"
#include "lnls/spectral.hpp"

// Lattice NLS  i u_t + Delta_h u - lambda |u|^{p-1} u = 0  and its free flow.
namespace lnls {

/// Nonlinearity |u|^{p-1} u with sign lambda (+1 defocusing, -1 focusing).
struct NlsParams {
  double p = 3.0;
  int lambda = 1;
  /// Test hook: drop the nonlinear term (free evolution) while keeping p, lambda on record.
  bool free = false;

  void validate() const {
    if (!(p > 1.0)) throw DomainError("p > 1 required, got p = " + std::to_string(p));
    if (lambda != 1 && lambda != -1) throw DomainError("lambda must be +1 or -1");
  }

  /// Coefficient actually multiplying |u|^{p-1}u.
  double coefficient() const noexcept { return free ? 0.0 : static_cast<double>(lambda); }

  /// Non-empty when (d, p, lambda) sits outside the 1 < p < 3 focusing range.
  std::optional<std::string> hypothesis_warning(int dim) const {
    if (lambda == -1 && dim == 2 && !(p < 3.0))
      return "focusing run with p = " + std::to_string(p) + " violates 1 < p < 3 (d = 2)";
    return std::nullopt;
  }

  static NlsParams linear(double p = 3.0, int lambda = 1) { return {p, lambda, true}; }
};

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
};

enum class Integrator { strang, rk4, duhamel_picard };

inline std::string to_string(Integrator i) {
  switch (i) {
    case Integrator::strang: return "strang";
    case Integrator::rk4: return "rk4";
    case Integrator::duhamel_picard: return "duhamel_picard";
  }
  return "?";
}

inline Integrator integrator_from_string(const std::string& s) {
  if (s == "strang") return Integrator::strang;
  if (s == "rk4") return Integrator::rk4;
  if (s == "duhamel_picard") return Integrator::duhamel_picard;
  throw DomainError("unknown integrator '" + s + "' (expected strang, rk4 or duhamel_picard)");
}

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  Integrator integrator = Integrator::strang;
  int record_stride = 1;

  void validate() const {
    if (!(dt > 0.0)) throw DomainError("dt > 0 required");
    if (!(t_final >= 0.0)) throw DomainError("t_final >= 0 required");
    if (record_stride < 1) throw DomainError("record_stride >= 1 required");
  }
};

/// Multiplier exp(-i t sigma_h(k)), the symbol of e^{it Delta_h}.
inline Multiplier free_propagator(const Lattice& lat, double t) {
  return Multiplier::from_symbol(
      lat,
      [&](const MultiIndex& k) { return std::polar(1.0, -t * laplacian_symbol_value(k, lat.dim(), lat.spacing())); },
      "exp(it laplacian)");
}

/// e^{it Delta_h} u0.
inline GridFunction linear_flow(const GridFunction& u0, double t) {
  return apply_multiplier(free_propagator(u0.lattice(), t), u0);
}

/// |u|^{p-1} u pointwise.
inline GridFunction power_nonlinearity(const GridFunction& u, double p) {
  GridFunction out(u.lattice());
  for (std::size_t s = 0; s < u.size(); ++s) {
    const double a = std::abs(u[s]);
    const double w = p == 3.0 ? a * a : (a == 0.0 ? 0.0 : std::pow(a, p - 1.0));
    out[s] = w * u[s];
  }
  return out;
}

inline cplx power_nonlinearity(cplx z, double p) {
  const double a = std::abs(z);
  if (a == 0.0) return 0.0;
  return (p == 3.0 ? a * a : std::pow(a, p - 1.0)) * z;
}

/// Exact flow of i u_t = lambda |u|^{p-1} u over dt: a pointwise phase rotation.
inline GridFunction nonlinear_phase_step(const GridFunction& u, const NlsParams& params, double dt) {
  const double c = params.coefficient();
  GridFunction out(u.lattice());
  for (std::size_t s = 0; s < u.size(); ++s) {
    const double a = std::abs(u[s]);
    const double w = params.p == 3.0 ? a * a : (a == 0.0 ? 0.0 : std::pow(a, params.p - 1.0));
    out[s] = u[s] * std::polar(1.0, -c * w * dt);
  }
  return out;
}

/// Strang splitting with the linear substep precomputed for a fixed dt.
class StrangStepper {
 public:
  StrangStepper(const Lattice& lat, NlsParams params, double dt)
      : params_(params), dt_(dt), propagator_(free_propagator(lat, dt)) {
    params_.validate();
    if (!(dt > 0.0)) throw DomainError("strang: dt > 0 required");
  }

  double dt() const noexcept { return dt_; }

  GridFunction step(const GridFunction& u) const {
    GridFunction half = nonlinear_phase_step(u, params_, 0.5 * dt_);
    GridFunction moved = inverse(apply_in_frequency(propagator_, forward(half)));
    return nonlinear_phase_step(moved, params_, 0.5 * dt_);
  }

 private:
  NlsParams params_;
  double dt_;
  Multiplier propagator_;
};

/// N(dt/2) o L(dt) o N(dt/2).
inline GridFunction step_strang(const GridFunction& u, const NlsParams& params, double dt) {
  return StrangStepper(u.lattice(), params, dt).step(u);
}

/// Largest dt accepted by step_rk4: 0.5 h^2 / d.
inline double rk4_stability_limit(const Lattice& lat) {
  return 0.5 * lat.spacing() * lat.spacing() / lat.dim();
}

namespace detail {

// du/dt = i Delta_h u - i lambda |u|^{p-1} u, with the stencil Laplacian.
inline GridFunction nls_vector_field(const GridFunction& u, const NlsParams& params) {
  GridFunction out = discrete_laplacian_stencil(u);
  const double c = params.coefficient();
  if (c != 0.0) out -= c * power_nonlinearity(u, params.p);
  out *= cplx(0.0, 1.0);
  return out;
}

}  // namespace detail

/// Classical RK4 on the lattice ODE system.
inline GridFunction step_rk4(const GridFunction& u, const NlsParams& params, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw DomainError("rk4: dt > 0 required");
  const double limit = rk4_stability_limit(u.lattice());
  if (dt > limit * (1.0 + 1e-12))
    throw DomainError("rk4: dt = " + std::to_string(dt) + " exceeds stability limit 0.5 h^2/d = " +
                      std::to_string(limit));
  using detail::nls_vector_field;
  const GridFunction k1 = nls_vector_field(u, params);
  const GridFunction k2 = nls_vector_field(u + (0.5 * dt) * k1, params);
  const GridFunction k3 = nls_vector_field(u + (0.5 * dt) * k2, params);
  const GridFunction k4 = nls_vector_field(u + dt * k3, params);
  GridFunction out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const double before = lebesgue_norm(u, 2.0);
  const double after = lebesgue_norm(out, 2.0);
  if (!out.all_finite() || (before > 0.0 && after > 10.0 * before) || (before == 0.0 && after > 0.0))
    throw NumericalError("rk4: instability detected (norm " + std::to_string(before) + " -> " +
                         std::to_string(after) + ")");
  return out;
}

/// Contraction factor p T h^{-d(p-1)/2} (2 ||u0||_2)^{p-1} of the Duhamel map on
/// the ball of radius 2 ||u0||_{L_h^2} (times |lambda|, which is 0 for free runs).
inline double picard_contraction_factor(const GridFunction& u0, const NlsParams& params, double T) {
  const Lattice& lat = u0.lattice();
  const double radius = 2.0 * lebesgue_norm(u0, 2.0);
  return std::abs(params.coefficient()) * params.p * T * std::pow(lat.spacing(), -lat.dim() * (params.p - 1.0) / 2.0) *
         std::pow(radius, params.p - 1.0);
}

struct PicardTrace {
  GridFunction solution;             ///< iterate at time T
  std::vector<double> increments;    ///< sup_t ||u^{(n+1)}(t) - u^{(n)}(t)||_{L_h^2} per iteration
  double contraction_factor = 0.0;
};

inline constexpr int kPicardNodes = 64;
inline constexpr int kPicardIterations = 8;

/// Iterates Gamma(u)(t) = e^{it Delta_h} u0 - i lambda int_0^t e^{i(t-s) Delta_h} |u|^{p-1}u(s) ds
/// on [0, T], with the time integral done by the composite trapezoid rule on `nodes` intervals.
/// The zeroth iterate is the free solution.
inline PicardTrace picard_trace(const GridFunction& u0, const NlsParams& params, double T,
                                int n_iter = kPicardIterations, int nodes = kPicardNodes) {
  params.validate();
  if (!(T > 0.0)) throw DomainError("picard: T > 0 required");
  if (n_iter < 1 || nodes < 1) throw DomainError("picard: n_iter >= 1 and nodes >= 1 required");
  const double kappa = picard_contraction_factor(u0, params, T);
  if (!(kappa < 1.0)) {
    const double required = T / kappa;
    throw DomainError("picard: contraction factor " + std::to_string(kappa) + " >= 1; need T < " +
                      std::to_string(required));
  }
  const Lattice& lat = u0.lattice();
  const double ds = T / nodes;
  const SpectrumFunction u0_hat = forward(u0);
  const Multiplier sigma = laplacian_symbol(lat);

  const auto phase = [&](double t) {
    SpectrumFunction out(lat);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::polar(1.0, -t * sigma.symbol()[s].real());
    return out;
  };

  std::vector<SpectrumFunction> forward_phase, backward_phase;
  std::vector<GridFunction> path;
  for (int n = 0; n <= nodes; ++n) {
    forward_phase.push_back(phase(n * ds));
    backward_phase.push_back(phase(-n * ds));
    path.push_back(inverse(u0_hat * forward_phase.back()));
  }

  PicardTrace trace{path.back(), {}, kappa};
  const cplx coupling = cplx(0.0, -params.coefficient());
  for (int it = 0; it < n_iter; ++it) {
    std::vector<GridFunction> next;
    next.reserve(path.size());
    SpectrumFunction running(lat);   // trapezoid sum up to the previous node
    SpectrumFunction previous(lat);  // integrand at the previous node
    double increment = 0.0;
    for (int n = 0; n <= nodes; ++n) {
      SpectrumFunction g = forward(power_nonlinearity(path[n], params.p)) * backward_phase[n];
      if (n > 0) {
        SpectrumFunction trapezoid = previous + g;
        trapezoid *= 0.5 * ds;
        running += trapezoid;
      }
      previous = g;
      SpectrumFunction value = u0_hat + coupling * running;
      next.push_back(inverse(value * forward_phase[n]));
      increment = std::max(increment, lebesgue_norm(next.back() - path[n], 2.0));
    }
    path = std::move(next);
    trace.increments.push_back(increment);
  }
  trace.solution = path.back();
  return trace;
}

inline GridFunction picard_iterate(const GridFunction& u0, const NlsParams& params, double T,
                                   int n_iter = kPicardIterations) {
  return picard_trace(u0, params, T, n_iter).solution;
}

/// Mass ||u||^2 and energy (1/2)||sqrt(-Delta_h) u||^2 + lambda/(p+1) ||u||_{p+1}^{p+1}.
inline ConservedQuantities conserved(const GridFunction& u, const NlsParams& params) {
  const Lattice& lat = u.lattice();
  const double mass = std::pow(lebesgue_norm(u, 2.0), 2);
  const double gradient = weighted_spectral_norm(forward(u), [&](const MultiIndex& k) {
    return laplacian_symbol_value(k, lat.dim(), lat.spacing());
  });
  const double potential = params.coefficient() == 0.0
                               ? 0.0
                               : params.coefficient() / (params.p + 1.0) * std::pow(lebesgue_norm(u, params.p + 1.0), params.p + 1.0);
  return {mass, 0.5 * gradient * gradient + potential};
}

struct Snapshot {
  double t;
  GridFunction u;
  ConservedQuantities conserved;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
};

namespace detail {

class Stepper {
 public:
  Stepper(const Lattice& lat, const NlsParams& params, Integrator kind) : lat_(lat), params_(params), kind_(kind) {}

  GridFunction step(const GridFunction& u, double dt) {
    switch (kind_) {
      case Integrator::strang: {
        auto it = strang_.find(dt);
        if (it == strang_.end()) it = strang_.emplace(dt, StrangStepper(lat_, params_, dt)).first;
        return it->second.step(u);
      }
      case Integrator::rk4:
        return step_rk4(u, params_, dt);
      case Integrator::duhamel_picard:
        return picard_iterate(u, params_, dt);
    }
    return u;
  }

 private:
  Lattice lat_;
  NlsParams params_;
  Integrator kind_;
  std::map<double, StrangStepper> strang_;
};

inline void check_growth(const GridFunction& u, double mass0) {
  if (!u.all_finite()) throw NumericalError("evolve: non-finite state");
  const double mass = std::pow(lebesgue_norm(u, 2.0), 2);
  if (mass > 100.0 * std::max(mass0, 1e-300) && mass > 1e-300)
    throw NumericalError("evolve: norm grew by more than 10x");
}

// Number of equal steps of size <= dt covering a span (at least one for span > 0).
inline int step_count(double span, double dt) {
  if (span <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

}  // namespace detail

/// Runs the chosen integrator to cfg.t_final with ceil(t_final/dt) equal steps.
/// Snapshots are taken every record_stride steps and always at t = 0 and t_final.
inline Trajectory evolve(const GridFunction& u0, const NlsParams& params, const EvolutionConfig& cfg) {
  params.validate();
  cfg.validate();
  Trajectory traj;
  traj.snapshots.push_back({0.0, u0, conserved(u0, params)});
  const int steps = detail::step_count(cfg.t_final, cfg.dt);
  if (steps == 0) return traj;
  const double dt = cfg.t_final / steps;
  const double mass0 = traj.snapshots.front().conserved.mass;
  detail::Stepper stepper(u0.lattice(), params, cfg.integrator);
  GridFunction u = u0;
  for (int n = 1; n <= steps; ++n) {
    u = stepper.step(u, dt);
    detail::check_growth(u, mass0);
    if (n % cfg.record_stride == 0 || n == steps) {
      const double t = n == steps ? cfg.t_final : n * dt;
      traj.snapshots.push_back({t, u, conserved(u, params)});
    }
  }
  return traj;
}

/// States at each of the (nondecreasing, >= 0) `times`; each interval between
/// consecutive times is split into equal steps no longer than dt.
inline std::vector<GridFunction> evolve_to_times(const GridFunction& u0, const NlsParams& params, double dt,
                                                 Integrator integrator, const std::vector<double>& times) {
  params.validate();
  if (!(dt > 0.0)) throw DomainError("dt > 0 required");
  std::vector<GridFunction> out;
  detail::Stepper stepper(u0.lattice(), params, integrator);
  const double mass0 = std::pow(lebesgue_norm(u0, 2.0), 2);
  GridFunction u = u0;
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw DomainError("evolve_to_times: times must be nondecreasing and >= 0");
    const int steps = detail::step_count(t - now, dt);
    const double local = steps ? (t - now) / steps : 0.0;
    for (int n = 0; n < steps; ++n) {
      u = stepper.step(u, local);
      detail::check_growth(u, mass0);
    }
    now = t;
    out.push_back(u);
  }
  return out;
}

/// (int_0^T ||u(t)||_{L_h^r}^q dt)^{1/q} by the trapezoid rule over the snapshots.
inline double time_averaged_norm(const Trajectory& traj, double q, double r) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) return 0.0;
  std::vector<double> norms;
  for (const auto& s : snaps) norms.push_back(lebesgue_norm(s.u, r));
  if (std::isinf(q)) return *std::max_element(norms.begin(), norms.end());
  double sum = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i)
    sum += 0.5 * (snaps[i].t - snaps[i - 1].t) * (std::pow(norms[i], q) + std::pow(norms[i - 1], q));
  return std::pow(sum, 1.0 / q);
}

/// q* for the time-averaged L_h^infinity bound: 2 when p < 3, otherwise p (> p - 1).
inline double default_time_exponent(double p) { return p < 3.0 ? 2.0 : p; }

}  // namespace lnls
