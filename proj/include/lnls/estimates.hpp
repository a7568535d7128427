#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lnls/dynamics.hpp"
#include "lnls/error.hpp"
#include "lnls/lattice.hpp"
#include "lnls/records.hpp"
#include "lnls/sampler.hpp"
#include "lnls/spectral.hpp"

// Measured constants for the lattice dispersive and Strichartz estimates.
namespace lnls {

/// (q, r) with 3/q + d/r = d/2, q, r in [2, inf], excluding (2, inf, 3).
class AdmissiblePair {
 public:
  AdmissiblePair(double q, double r, int dim) : q_(q), r_(r), dim_(dim) {
    const auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
    std::ostringstream where;
    where << "(q, r, d) = (" << q << ", " << r << ", " << dim << ")";
    if (!(q >= 2.0) || !(r >= 2.0)) throw DomainError(where.str() + ": q, r must lie in [2, inf]");
    if (std::abs(3.0 * inv(q) + dim * inv(r) - 0.5 * dim) > 1e-12)
      throw DomainError(where.str() + " violates 3/q + d/r = d/2");
    if (q == 2.0 && std::isinf(r) && dim == 3) throw DomainError(where.str() + " is the excluded endpoint (2, inf, 3)");
  }

  double q() const noexcept { return q_; }
  double r() const noexcept { return r_; }
  int dim() const noexcept { return dim_; }

 private:
  double q_, r_;
  int dim_;
};

struct KernelQuery {
  Lattice lattice;
  DyadicScale scale;
  double c = 0.1;        ///< small-time constant: |t| <= c h / N
  int t_samples = 64;    ///< t_i = (i / t_samples) c h / N, i = 1..t_samples

  double window() const { return c * lattice.spacing() / scale.value(); }
  /// Largest |k| in the kernel sum: floor(pi N / h) = floor(N M).
  int frequency_cutoff() const { return static_cast<int>(std::floor(scale.frequency_radius() + 1e-12)); }
};

namespace detail {

// S(m) = sum_{|k| <= K} exp(i(k m h - (2t/h^2)(1 - cos hk))) for every m in {-M..M-1}.
inline std::vector<cplx> kernel_axis_sums(const Lattice& lat, int cutoff, double t) {
  const int M = lat.half_size();
  const int n = 2 * M;
  const double h = lat.spacing();
  std::vector<cplx> roots(n);
  for (int j = 0; j < n; ++j) roots[j] = std::polar(1.0, kTwoPi * j / n);  // e^{i j h}
  std::vector<cplx> weights(2 * cutoff + 1);
  for (int k = -cutoff; k <= cutoff; ++k) weights[k + cutoff] = std::polar(1.0, -(2.0 * t / (h * h)) * (1.0 - std::cos(h * k)));
  std::vector<cplx> out(n);
  for (int m = -M; m < M; ++m) {
    cplx sum = 0.0;
    for (int k = -cutoff; k <= cutoff; ++k) {
      const int e = (((k * m) % n) + n) % n;
      sum += weights[k + cutoff] * roots[e];
    }
    out[m + M] = sum;
  }
  return out;
}

}  // namespace detail

/// K_{N,t}(x) = (2 pi)^{-d} prod_j sum_{|k_j| <= pi N/h} exp(i(x_j k_j - (2t/h^2)(1 - cos h k_j))).
inline cplx dispersive_kernel(const KernelQuery& query, double t, const MultiIndex& x) {
  const Lattice& lat = query.lattice;
  const double h = lat.spacing();
  const int cutoff = query.frequency_cutoff();
  cplx value = 1.0;
  for (int j = 0; j < lat.dim(); ++j) {
    cplx sum = 0.0;
    for (int k = -cutoff; k <= cutoff; ++k)
      sum += std::polar(1.0, x[j] * h * k - (2.0 * t / (h * h)) * (1.0 - std::cos(h * k)));
    value *= sum / kTwoPi;
  }
  return value;
}

/// K_{N,t} as a grid function on the query's lattice.
inline GridFunction dispersive_kernel_grid(const KernelQuery& query, double t) {
  const Lattice& lat = query.lattice;
  const auto axis = detail::kernel_axis_sums(lat, query.frequency_cutoff(), t);
  const int M = lat.half_size();
  return GridFunction::generate(lat, [&](const Point& p) {
    const auto idx = [&](double x) { return static_cast<int>(std::lround(x / lat.spacing())) + M; };
    cplx v = axis[idx(p[0])] / kTwoPi;
    if (lat.dim() == 2) v *= axis[idx(p[1])] / kTwoPi;
    return v;
  });
}

/// One record per sampled t in (0, c h/N]: value = sup_x |K_{N,t}(x)|,
/// ratio = value (h t / N)^{d/3}. The d = 2 supremum is the square of the d = 1 one.
inline std::vector<ExperimentRecord> dispersive_bound_sweep(const KernelQuery& query) {
  const Lattice& lat = query.lattice;
  const double h = lat.spacing();
  const double N = query.scale.value();
  const int d = lat.dim();
  std::vector<ExperimentRecord> out;
  for (int i = 1; i <= query.t_samples; ++i) {
    const double t = query.window() * i / query.t_samples;
    const auto axis = detail::kernel_axis_sums(lat, query.frequency_cutoff(), t);
    double sup = 0.0;
    for (const auto& s : axis) sup = std::max(sup, std::abs(s) / kTwoPi);
    sup = std::pow(sup, d);
    ExperimentRecord rec;
    rec.experiment = "dispersive";
    rec.h = h;
    rec.N = N;
    rec.t = t;
    rec.value = sup;
    rec.ratio = sup * std::pow(h * t / N, d / 3.0);
    rec.metadata["d"] = std::to_string(d);
    rec.metadata["c"] = format_double(query.c);
    out.push_back(std::move(rec));
  }
  return out;
}

/// sup over t of the dispersive ratio for every dyadic N on one lattice.
inline double dispersive_max_ratio(const Lattice& lat, double c = 0.1, int t_samples = 64) {
  double best = 0.0;
  for (const auto& scale : DyadicScale::all(lat)) {
    for (const auto& rec : dispersive_bound_sweep({lat, scale, c, t_samples})) best = std::max(best, *rec.ratio);
  }
  return best;
}

struct OscillatoryIntegral {
  cplx value;
  double error_estimate;
};

/// I_{N,h,t,x} = int_{-pi N/h}^{pi N/h} exp(i(x xi - (2t/h^2)(1 - cos h xi))) d xi,
/// by adaptive Gauss-Kronrod on panels of at most half an oscillation.
inline OscillatoryIntegral oscillatory_integral(double N, double h, double t, double x, double tol = 1e-10) {
  if (!(N > 0.0) || !(h > 0.0)) throw DomainError("oscillatory_integral: N, h > 0 required");
  const double b = std::numbers::pi * N / h;
  const auto phase = [&](double xi) { return x * xi - (2.0 * t / (h * h)) * (1.0 - std::cos(h * xi)); };
  const auto f = [&](double xi) { return std::polar(1.0, phase(xi)); };
  const double max_slope = std::abs(x) + 2.0 * std::abs(t) / h;
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * b * max_slope / std::numbers::pi)));
  const double width = 2.0 * b / panels;
  cplx total = 0.0;
  double error = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = -b + p * width;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, lo + width, 10, 1e-13, &err);
    error += err;
  }
  if (!(error <= tol * std::max(1.0, std::abs(total))))
    throw AccuracyError("oscillatory_integral: quadrature error estimate " + std::to_string(error) +
                        " above tolerance");
  return {total, error};
}

/// |sum_{a < n <= b} e^{i phi(n)} - int_a^b e^{i phi}| with a = -pi N/h, b = pi N/h.
/// The comparison bound requires |phi'| < 2 pi on (a, b); violations raise DomainError.
inline double zygmund_gap(double N, double h, double t, double x) {
  const double b = std::numbers::pi * N / h;
  const double slope_bound = std::abs(x) + (2.0 * std::abs(t) / h) * std::sin(std::min(std::numbers::pi * N, std::numbers::pi / 2));
  if (!(slope_bound < kTwoPi)) throw DomainError("zygmund_gap: requires |phi'| < 2 pi on the interval");
  cplx sum = 0.0;
  const int lo = static_cast<int>(std::floor(-b)) + 1;
  const int hi = static_cast<int>(std::floor(b + 1e-12));
  for (int n = lo; n <= hi; ++n)
    sum += std::polar(1.0, x * n - (2.0 * t / (h * h)) * (1.0 - std::cos(h * n)));
  return std::abs(sum - oscillatory_integral(N, h, t, x).value);
}

// ---------------------------------------------------------------------------
// Strichartz

struct StrichartzQuery {
  AdmissiblePair pair;
  double epsilon = 0.1;
  std::vector<double> h_list;
  int t_quadrature = 257;  ///< Simpson nodes on [0, 1] (odd)
};

/// Composite Simpson weights for an odd number of equispaced nodes on [0, T].
inline std::vector<double> simpson_weights(int nodes, double T = 1.0) {
  if (nodes < 3 || nodes % 2 == 0) throw DomainError("simpson: odd node count >= 3 required");
  std::vector<double> w(nodes);
  const double step = T / (nodes - 1);
  for (int i = 0; i < nodes; ++i) w[i] = step / 3.0 * (i == 0 || i == nodes - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0));
  return w;
}

/// ||e^{it Delta_h} u0||_{L_h^r} at t_i = i / (nodes - 1), for each r in rs.
inline std::vector<std::vector<double>> free_flow_norms(const GridFunction& u0, const std::vector<double>& rs, int nodes) {
  const Lattice& lat = u0.lattice();
  const SpectrumFunction u0_hat = forward(u0);
  const Multiplier sigma = laplacian_symbol(lat);
  std::vector<std::vector<double>> out(rs.size(), std::vector<double>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double t = static_cast<double>(i) / (nodes - 1);
    SpectrumFunction spec = u0_hat;
    for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= std::polar(1.0, -t * sigma.symbol()[s].real());
    const GridFunction u = inverse(spec);
    for (std::size_t j = 0; j < rs.size(); ++j) out[j][i] = lebesgue_norm(u, rs[j]);
  }
  return out;
}

/// (int_0^1 f(t)^q dt)^{1/q} from equispaced samples on [0, 1]; max for q = inf.
inline double time_norm(const std::vector<double>& samples, double q) {
  if (std::isinf(q)) return *std::max_element(samples.begin(), samples.end());
  const auto w = simpson_weights(static_cast<int>(samples.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * std::pow(samples[i], q);
  return std::pow(sum, 1.0 / q);
}

/// Subsample every other node (n odd -> (n + 1) / 2 nodes).
inline std::vector<double> every_other(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
  return out;
}

struct MixedNorm {
  double value;       ///< with t_quadrature nodes
  double refined;     ///< with 2 t_quadrature - 1 nodes
  double relative_change() const { return std::abs(value - refined) / std::max(refined, 1e-300); }
};

/// ||e^{it Delta_h} u0||_{L_t^q([0,1]; L_h^r)} for several pairs at once; throws
/// AccuracyError when doubling the nodes moves any value by 1% or more.
inline std::vector<MixedNorm> strichartz_norms(const GridFunction& u0, const std::vector<AdmissiblePair>& pairs, int nodes) {
  std::vector<double> rs;
  for (const auto& p : pairs) rs.push_back(p.r());
  const auto fine = free_flow_norms(u0, rs, 2 * nodes - 1);
  std::vector<MixedNorm> out;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    MixedNorm m{time_norm(every_other(fine[j]), pairs[j].q()), time_norm(fine[j], pairs[j].q())};
    if (m.relative_change() >= 0.01)
      throw AccuracyError("strichartz: time quadrature changed by " + std::to_string(100 * m.relative_change()) +
                          "% under node doubling");
    out.push_back(m);
  }
  return out;
}

/// One record per (h, profile, pair): value = mixed norm,
/// ratio = value / ||<grad_h>^{2/q + eps} d_h f||_{L_h^2}.
inline std::vector<ExperimentRecord> strichartz_sweep(const std::vector<AdmissiblePair>& pairs, double epsilon,
                                                      const std::vector<double>& h_list, const std::vector<Sampler>& profiles,
                                                      int nodes = 257) {
  if (!(epsilon > 0.0)) throw DomainError("strichartz: epsilon > 0 required");
  if (pairs.empty()) throw DomainError("strichartz: at least one admissible pair required");
  std::vector<ExperimentRecord> out;
  for (double h : h_list) {
    if (!(h > 0.0 && h <= 1.0)) throw DomainError("strichartz: spacings must lie in (0, 1], got " + format_double(h));
    const Lattice lat(pairs.front().dim(), half_size_for_spacing(h));
    for (const auto& f : profiles) {
      const GridFunction u0 = discretize(*f, lat);
      const auto norms = strichartz_norms(u0, pairs, nodes);
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        ExperimentRecord rec;
        rec.experiment = "strichartz";
        rec.h = lat.spacing();
        rec.q = pairs[j].q();
        rec.r = pairs[j].r();
        rec.epsilon = epsilon;
        rec.value = norms[j].value;
        const double denom = sobolev_norm(u0, 2.0 / pairs[j].q() + epsilon);
        rec.ratio = denom > 0.0 ? norms[j].value / denom : 0.0;
        rec.metadata["profile"] = f->tag();
        rec.metadata["quadrature_change"] = format_double(norms[j].relative_change());
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

inline std::vector<ExperimentRecord> strichartz_sweep(const StrichartzQuery& query, const std::vector<Sampler>& profiles) {
  return strichartz_sweep({query.pair}, query.epsilon, query.h_list, profiles, query.t_quadrature);
}

/// ||e^{it Delta_h} u0||_{L_t^q([0,1]; L_h^inf)} / ||u0||_{H_h^1} for each q.
inline std::vector<double> linear_time_averaged_ratios(const GridFunction& u0, const std::vector<double>& qs, int nodes = 257) {
  const auto norms = free_flow_norms(u0, {kInfinity}, nodes).front();
  const double h1 = sobolev_norm(u0, 1.0);
  std::vector<double> out;
  for (double q : qs) out.push_back(h1 > 0.0 ? time_norm(norms, q) / h1 : 0.0);
  return out;
}

}  // namespace lnls
