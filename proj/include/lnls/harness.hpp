#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lnls/dynamics.hpp"
#include "lnls/error.hpp"
#include "lnls/lattice.hpp"
#include "lnls/parallel.hpp"
#include "lnls/records.hpp"
#include "lnls/reference.hpp"
#include "lnls/sampler.hpp"
#include "lnls/spectral.hpp"

// Continuum-limit experiments: discretize, evolve on the lattice, interpolate, compare.
namespace lnls {

/// pi / 2^k for k = first..last.
inline std::vector<double> dyadic_spacings(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::numbers::pi / std::ldexp(1.0, k));
  return out;
}

inline void validate_h_list(const std::vector<double>& h_list) {
  if (h_list.size() < 3) throw DomainError("h_list: >= 3 spacings required, got " + std::to_string(h_list.size()));
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0 && h_list[i] <= 1.0))
      throw DomainError("h_list: spacings must lie in (0, 1], got " + format_double(h_list[i]));
    half_size_for_spacing(h_list[i]);
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw DomainError("h_list: must be strictly decreasing");
  }
}

struct ConvergenceStudy {
  NlsParams params;
  Sampler u0;
  std::vector<double> h_list = dyadic_spacings(3, 7);
  std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
  double dt = 2.5e-3;
  Integrator integrator = Integrator::strang;
  ReferenceOptions reference{256, 2.5e-3, 0.05, true};
  int oversample = kDefaultOversample;
  int threads = 1;
  /// Reported errors may move by at most this fraction when the reference resolution doubles.
  double reference_independence = 0.05;

  void validate() const {
    params.validate();
    if (!u0) throw DomainError("study: initial data missing");
    validate_h_list(h_list);
    if (times.empty()) throw DomainError("study: at least one time required");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!(times[i] >= 0.0)) throw DomainError("study: times must be >= 0");
      if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("study: times must be strictly increasing");
    }
    if (!(dt > 0.0)) throw DomainError("study: dt > 0 required");
  }
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root mean square of the log residuals
  std::size_t points = 0;
};

/// Least-squares line through (x_i, y_i).
inline RateFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit: abscissae must not all coincide");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - fit.intercept - fit.slope * x[i], 2);
  fit.residual = std::sqrt(ss / n);
  fit.points = n;
  return fit;
}

/// Slope of log(value) against log(h).
inline RateFit fit_rate(const std::vector<ExperimentRecord>& records) {
  std::vector<double> x, y;
  std::map<double, int> distinct;
  for (const auto& rec : records) {
    if (!rec.h || !rec.value) throw DomainError("fit_rate: records need h and value");
    if (!(*rec.value > 0.0)) throw DomainError("fit_rate: nonpositive error " + format_double(*rec.value) + " (log undefined)");
    x.push_back(std::log(*rec.h));
    y.push_back(std::log(*rec.value));
    ++distinct[*rec.h];
  }
  if (distinct.size() < 3) throw DomainError("fit_rate: >= 3 distinct spacings required");
  return fit_line(x, y);
}

struct GrowthFit {
  double A_hat = 0.0;
  double B_hat = 0.0;
  double residual = 0.0;
};

/// Fits log(value / sqrt(h)) = log A + B t over all records.
inline GrowthFit growth_fit(const std::vector<ExperimentRecord>& records) {
  std::vector<double> x, y;
  std::map<double, int> distinct;
  for (const auto& rec : records) {
    if (!rec.h || !rec.value || !rec.t) throw DomainError("growth_fit: records need h, t and value");
    if (!(*rec.value > 0.0)) throw DomainError("growth_fit: nonpositive error (log undefined)");
    x.push_back(std::abs(*rec.t));
    y.push_back(std::log(*rec.value / std::sqrt(*rec.h)));
    ++distinct[*rec.t];
  }
  if (distinct.size() < 3) throw DomainError("growth_fit: >= 3 distinct times required");
  const RateFit f = fit_line(x, y);
  return {std::exp(f.intercept), f.slope, f.residual};
}

inline std::map<std::string, std::string> study_metadata(const NlsParams& params, Integrator integrator, double dt) {
  return {{"p", format_double(params.p)},
          {"lambda", std::to_string(params.lambda)},
          {"free", params.free ? "true" : "false"},
          {"q_star", format_double(default_time_exponent(params.p))},
          {"integrator", to_string(integrator)},
          {"dt", format_double(dt)}};
}

struct ConvergenceResult {
  std::vector<ExperimentRecord> records;
  std::map<double, RateFit> fits;  ///< keyed by t
  double reference_self_convergence = 0.0;
  double reference_gap = 0.0;
  std::vector<std::string> warnings;
  /// True when errors strictly decrease along h_list at every t.
  bool monotone = true;
};

/// Per (h, t): ||p_h U_h(t) d_h u0 - U(t) u0||_{L^2}, with U(0) u0 = u0 and U(t) the
/// certified spectral reference. Aborts with AccuracyError when the reference
/// resolution could move any reported error by the reference_independence fraction.
inline ConvergenceResult run_convergence(const ConvergenceStudy& study) {
  study.validate();
  ConvergenceResult result;
  const int dim = study.u0->dim();
  if (auto w = study.params.hypothesis_warning(dim)) result.warnings.push_back(*w);

  std::vector<double> positive;
  for (double t : study.times)
    if (t > 0.0) positive.push_back(t);
  std::map<double, TrigHandle> reference;
  if (!positive.empty()) {
    const ReferenceRun run = reference_solutions(*study.u0, study.params, positive, study.reference);
    for (std::size_t i = 0; i < positive.size(); ++i) reference[positive[i]] = run.solutions[i];
    result.reference_self_convergence = run.self_convergence;
    result.reference_gap = run.absolute_gap;
  }

  const std::size_t nt = study.times.size();
  std::vector<std::vector<double>> errors(study.h_list.size(), std::vector<double>(nt));
  parallel_for(study.h_list.size(), study.threads, [&](std::size_t i) {
    const Lattice lat(dim, half_size_for_spacing(study.h_list[i]));
    const GridFunction u0h = discretize(*study.u0, lat);
    const auto states = evolve_to_times(u0h, study.params, study.dt, study.integrator, study.times);
    for (std::size_t j = 0; j < nt; ++j) {
      const double t = study.times[j];
      const ContinuumSampler& target = t > 0.0 ? static_cast<const ContinuumSampler&>(*reference.at(t)) : *study.u0;
      errors[i][j] = continuum_l2_error(states[j], target, study.oversample);
    }
  });

  const auto meta = study_metadata(study.params, study.integrator, study.dt);
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<ExperimentRecord> column;
    for (std::size_t i = 0; i < study.h_list.size(); ++i) {
      ExperimentRecord rec;
      rec.experiment = study.params.free ? "converge_linear" : "converge";
      rec.h = study.h_list[i];
      rec.t = study.times[j];
      rec.value = errors[i][j];
      rec.ratio = errors[i][j] / std::sqrt(study.h_list[i]);
      rec.metadata = meta;
      rec.metadata["profile"] = study.u0->tag();
      if (i > 0 && !(errors[i][j] < errors[i - 1][j])) result.monotone = false;
      column.push_back(rec);
      result.records.push_back(std::move(rec));
    }
    result.fits[study.times[j]] = fit_rate(column);
    if (study.times[j] > 0.0) {
      const double smallest = *std::min_element(column.begin(), column.end(), [](const auto& a, const auto& b) {
                                 return *a.value < *b.value;
                               })->value;
      if (result.reference_gap > study.reference_independence * smallest)
        throw AccuracyError("converge: reference gap " + format_double(result.reference_gap) + " exceeds " +
                            format_double(study.reference_independence) + " of the smallest error " +
                            format_double(smallest) + "; raise the reference resolution");
    }
  }
  return result;
}

/// sup_t error(t) / (sqrt(h) <t>) over t > 0, per h, and the spread of its maximum over h
/// against its minimum over t. Used to check at most linear growth of error / sqrt(h).
struct LinearGrowthCheck {
  std::map<double, double> normalized_by_t;  ///< max_h error / (sqrt(h) <t>)
  double spread = 0.0;
  bool pass(double band = 3.0) const { return normalized_by_t.size() >= 2 && spread < band; }
};

inline LinearGrowthCheck linear_growth_check(const std::vector<ExperimentRecord>& records) {
  LinearGrowthCheck out;
  for (const auto& rec : records) {
    if (!rec.t || !(*rec.t > 0.0)) continue;
    const double v = *rec.value / (std::sqrt(*rec.h) * std::sqrt(1.0 + *rec.t * *rec.t));
    auto [it, inserted] = out.normalized_by_t.try_emplace(*rec.t, v);
    if (!inserted) it->second = std::max(it->second, v);
  }
  if (out.normalized_by_t.empty()) return out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [t, v] : out.normalized_by_t) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.spread = hi / lo;
  return out;
}

// ---------------------------------------------------------------------------
// Interpolation and boundedness studies (no time evolution).

/// ||(p_h o d_h) f - f||_{L^2} per (f, h); ratio = error / (h ||f||_{H^1}).
inline std::vector<ExperimentRecord> interpolation_study(const std::vector<Sampler>& corpus, const std::vector<double>& h_list,
                                                         int oversample = kDefaultOversample, int threads = 1) {
  validate_h_list(h_list);
  std::vector<ExperimentRecord> out(corpus.size() * h_list.size());
  parallel_for(out.size(), threads, [&](std::size_t cell) {
    const auto& f = corpus[cell / h_list.size()];
    const double h = h_list[cell % h_list.size()];
    const Lattice lat(f->dim(), half_size_for_spacing(h));
    const double error = continuum_l2_error(discretize(*f, lat), *f, oversample);
    ExperimentRecord rec;
    rec.experiment = "interpolation";
    rec.h = h;
    rec.t = 0.0;
    rec.value = error;
    const double h1 = continuum_sobolev_norm(*f, 1.0);
    rec.ratio = h1 > 0.0 ? error / (h * h1) : 0.0;
    rec.metadata["profile"] = f->tag();
    out[cell] = std::move(rec);
  });
  return out;
}

/// ||d_h f||_{H_h^1} / ||f||_{H^1} and ||p_h f_h||_{H^1} / ||f_h||_{H_h^1} per (f, h);
/// the interpolant side uses the cellwise (broken) H^1 norm. Zero data is skipped and flagged.
inline std::vector<ExperimentRecord> boundedness_sweep(const std::vector<Sampler>& corpus, const std::vector<double>& h_list) {
  std::vector<ExperimentRecord> out;
  for (const auto& f : corpus) {
    const double f_h1 = continuum_sobolev_norm(*f, 1.0);
    for (double h : h_list) {
      const Lattice lat(f->dim(), half_size_for_spacing(h));
      const GridFunction fh = discretize(*f, lat);
      const double fh_h1 = sobolev_norm(fh, 1.0);
      for (const char* which : {"boundedness_discretize", "boundedness_interpolate"}) {
        ExperimentRecord rec;
        rec.experiment = which;
        rec.h = h;
        rec.metadata["profile"] = f->tag();
        if (f_h1 == 0.0 || fh_h1 == 0.0) {
          rec.metadata["skipped"] = "zero function";
        } else if (std::string(which) == "boundedness_discretize") {
          rec.value = fh_h1;
          rec.ratio = fh_h1 / f_h1;
        } else {
          const double ph = interpolant_broken_h1_norm(fh);
          rec.value = ph;
          rec.ratio = ph / fh_h1;
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error decomposition.

struct ErrorDecomposition {
  double h = 0.0, t = 0.0;
  double I1 = 0.0;  ///< ||p_h e^{it Delta_h} d_h u0 - e^{it Delta} u0||
  double I2 = 0.0;  ///< int_0^t sqrt(h) |t - s| ||u_h||_inf^{p-1} ||u_h||_{H^1} ds
  double I3 = 0.0;  ///< int_0^t ||p_h(|u_h|^{p-1} u_h) - |p_h u_h|^{p-1} p_h u_h|| ds
  double I4 = 0.0;  ///< int_0^t (||u_h||_inf + ||u||_inf)^{p-1} ||p_h u_h - u|| ds
  /// max_s of the I3 integrand over h ||u_h||_inf^{p-1} ||u_h||_{H^1}.
  double I3_ratio = 0.0;
};

namespace detail {

inline double trapezoid(const std::vector<double>& values, double span) {
  if (values.size() < 2) return 0.0;
  const double step = span / (values.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) sum += 0.5 * step * (values[i] + values[i - 1]);
  return sum;
}

}  // namespace detail

inline constexpr int kDecompositionNodes = 9;

/// Measures the four terms of the continuum-limit error splitting at (h, t)
/// with a trapezoid rule over kDecompositionNodes equispaced times in [0, t].
inline ErrorDecomposition decompose_error(const ConvergenceStudy& study, double h, double t) {
  study.params.validate();
  if (!study.u0) throw DomainError("decompose_error: initial data missing");
  if (!(t >= 0.0)) throw DomainError("decompose_error: t >= 0 required");
  const int dim = study.u0->dim();
  const Lattice lat(dim, half_size_for_spacing(h));
  const GridFunction u0h = discretize(*study.u0, lat);
  ErrorDecomposition out{h, t};

  const NlsParams linear = NlsParams::linear(study.params.p, study.params.lambda);
  if (t == 0.0) {
    out.I1 = continuum_l2_error(u0h, *study.u0, study.oversample);
    return out;
  }
  ReferenceOptions free_opts = study.reference;
  free_opts.certify = false;
  const auto free_ref = reference_solution(*study.u0, linear, t, free_opts);
  out.I1 = continuum_l2_error(linear_flow(u0h, t), *free_ref, study.oversample);

  std::vector<double> times(kDecompositionNodes);
  for (int i = 0; i < kDecompositionNodes; ++i) times[i] = t * i / (kDecompositionNodes - 1);
  const auto states = evolve_to_times(u0h, study.params, study.dt, study.integrator, times);
  std::vector<double> positive(times.begin() + 1, times.end());
  ReferenceOptions ref_opts = study.reference;
  ref_opts.certify = false;
  const auto refs = reference_solutions(*study.u0, study.params, positive, ref_opts).solutions;

  const double p = study.params.p;
  const std::size_t fine = lat.side() * 4;
  std::vector<double> f2, f3, f4;
  for (int i = 0; i < kDecompositionNodes; ++i) {
    const GridFunction& uh = states[i];
    const double sup = lebesgue_norm(uh, kInfinity);
    const double h1 = sobolev_norm(uh, 1.0);
    const double scale = std::pow(sup, p - 1.0) * h1;
    f2.push_back(std::sqrt(h) * (t - times[i]) * scale);

    const InterpolantSampler ph(uh);
    const InterpolantSampler ph_nonlinear(power_nonlinearity(uh, p));
    const auto composed = make_sampler(dim, [&](const Point& x) { return power_nonlinearity(ph(x), p); }, "nonlinear_of_interpolant");
    const double i3 = l2_distance(ph_nonlinear, *composed, fine);
    f3.push_back(i3);
    if (scale > 0.0) out.I3_ratio = std::max(out.I3_ratio, i3 / (h * scale));

    const ContinuumSampler& u = i == 0 ? static_cast<const ContinuumSampler&>(*study.u0) : *refs[i - 1];
    const auto u_grid = u.sample_grid(fine, 0.5);
    double u_sup = 0.0;
    for (const auto& z : u_grid) u_sup = std::max(u_sup, std::abs(z));
    f4.push_back(std::pow(sup + u_sup, p - 1.0) * l2_distance(ph, u, fine));
  }
  out.I2 = detail::trapezoid(f2, t);
  out.I3 = detail::trapezoid(f3, t);
  out.I4 = detail::trapezoid(f4, t);
  return out;
}

// ---------------------------------------------------------------------------
// Long-time L^infinity bound.

struct BoundednessStudy {
  NlsParams params;
  Sampler u0;
  std::vector<double> h_list = dyadic_spacings(3, 7);
  double T = 5.0;
  double dt = 1e-2;
  double q_star = 0.0;  ///< 0 selects default_time_exponent(p)
  int threads = 1;

  double exponent() const { return q_star > 0.0 ? q_star : default_time_exponent(params.p); }
};

/// Per h: value = (int_0^T ||u_h(t)||_{L_h^inf}^{q*} dt)^{1/q*} by the trapezoid rule on
/// every step, ratio = value / (<T>^{1/q*} ||d_h u0||_{H_h^1}).
inline std::vector<ExperimentRecord> nonlinear_boundedness(const BoundednessStudy& study) {
  study.params.validate();
  if (!study.u0) throw DomainError("boundedness: initial data missing");
  validate_h_list(study.h_list);
  if (!(study.T > 0.0) || !(study.dt > 0.0)) throw DomainError("boundedness: T > 0 and dt > 0 required");
  const double q = study.exponent();
  if (study.params.p >= 3.0 && !(q > study.params.p - 1.0))
    throw DomainError("boundedness: q* > p - 1 required for p >= 3");
  if (study.params.p < 3.0 && !(q >= 2.0)) throw DomainError("boundedness: q* >= 2 required");
  std::vector<ExperimentRecord> out(study.h_list.size());
  parallel_for(study.h_list.size(), study.threads, [&](std::size_t i) {
    const double h = study.h_list[i];
    const Lattice lat(study.u0->dim(), half_size_for_spacing(h));
    GridFunction u = discretize(*study.u0, lat);
    const double h1 = sobolev_norm(u, 1.0);
    const double mass0 = std::pow(lebesgue_norm(u, 2.0), 2);
    const int steps = detail::step_count(study.T, study.dt);
    const double dt = study.T / steps;
    StrangStepper stepper(lat, study.params, dt);
    double prev = std::pow(lebesgue_norm(u, kInfinity), q);
    double sum = 0.0, sup_h1 = h1;
    for (int n = 1; n <= steps; ++n) {
      u = stepper.step(u);
      detail::check_growth(u, mass0);
      const double cur = std::pow(lebesgue_norm(u, kInfinity), q);
      sum += 0.5 * dt * (prev + cur);
      prev = cur;
      if (n % 50 == 0 || n == steps) sup_h1 = std::max(sup_h1, sobolev_norm(u, 1.0));
    }
    ExperimentRecord rec;
    rec.experiment = "nonlinear_boundedness";
    rec.h = h;
    rec.q = q;
    rec.r = kInfinity;
    rec.t = study.T;
    rec.value = std::pow(sum, 1.0 / q);
    rec.ratio = h1 > 0.0 ? *rec.value / (std::pow(1.0 + study.T * study.T, 0.5 / q) * h1) : 0.0;
    rec.metadata = study_metadata(study.params, Integrator::strang, dt);
    rec.metadata["q_star"] = format_double(q);
    rec.metadata["profile"] = study.u0->tag();
    rec.metadata["sup_h1_over_initial"] = format_double(h1 > 0.0 ? sup_h1 / h1 : 0.0);
    out[i] = std::move(rec);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Conservation along Strang trajectories.

struct ConservationReport {
  double mass_drift = 0.0;    ///< max_t |M(t) - M(0)| / M(0)
  double energy_drift = 0.0;  ///< max_t |E(t) - E(0)| / max(|E(0)|, tiny)
};

inline ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport out;
  const auto& c0 = traj.snapshots.front().conserved;
  for (const auto& s : traj.snapshots) {
    if (c0.mass > 0.0) out.mass_drift = std::max(out.mass_drift, std::abs(s.conserved.mass - c0.mass) / c0.mass);
    out.energy_drift = std::max(out.energy_drift, std::abs(s.conserved.energy - c0.energy) / std::max(std::abs(c0.energy), 1e-300));
  }
  return out;
}

/// Energy drift at dt and dt/2, and their ratio (about 4 for a second-order scheme).
struct RichardsonCheck {
  double drift_coarse = 0.0;
  double drift_fine = 0.0;
  double ratio() const { return drift_coarse / drift_fine; }
};

inline RichardsonCheck energy_richardson(const GridFunction& u0, const NlsParams& params, double dt, double t_final) {
  const auto drift = [&](double step) {
    return conservation_report(evolve(u0, params, {step, t_final, Integrator::strang, 1})).energy_drift;
  };
  return {drift(dt), drift(dt / 2)};
}

}  // namespace lnls
