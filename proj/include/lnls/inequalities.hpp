#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lnls/error.hpp"
#include "lnls/lattice.hpp"
#include "lnls/records.hpp"
#include "lnls/sampler.hpp"
#include "lnls/spectral.hpp"

// Ratios lhs / rhs of the lattice Sobolev, Gagliardo-Nirenberg and Bernstein inequalities.
namespace lnls {

enum class InequalityKind { sobolev, gagliardo_nirenberg, bernstein };

inline std::string to_string(InequalityKind k) {
  switch (k) {
    case InequalityKind::sobolev: return "sobolev";
    case InequalityKind::gagliardo_nirenberg: return "gagliardo_nirenberg";
    case InequalityKind::bernstein: return "bernstein";
  }
  return "?";
}

inline InequalityKind inequality_from_string(const std::string& s) {
  if (s == "sobolev") return InequalityKind::sobolev;
  if (s == "gagliardo_nirenberg" || s == "gn") return InequalityKind::gagliardo_nirenberg;
  if (s == "bernstein") return InequalityKind::bernstein;
  throw DomainError("unknown inequality '" + s + "' (expected sobolev, gagliardo_nirenberg or bernstein)");
}

struct InequalityParams {
  double s = 0.5;        ///< Sobolev: 1/q = 1/2 - s/d
  double epsilon = 0.1;  ///< Sobolev regularity loss
  double theta = 0.5;    ///< GN: 1/p = 1/2 - theta/d
  double bernstein_s = -1.0;  ///< Bernstein: 1/q = 1/2 - s/d; negative means d/2 (q = inf)
};

/// 1 / (1/2 - s/d), infinite at s = d/2.
inline double exponent_for(double s, int dim) {
  const double inv = 0.5 - s / dim;
  return inv <= 1e-15 ? kInfinity : 1.0 / inv;
}

struct CorpusEntry {
  std::string tag;
  GridFunction u;
};

namespace detail {

inline void check_sobolev_hypothesis(double s, int dim, const char* who) {
  if (!(s > 0.0) || s > dim / 2.0 + 1e-15)
    throw DomainError(std::string(who) + ": requires 0 < s <= d/2, got s = " + format_double(s));
}

}  // namespace detail

/// One record per corpus element (Bernstein: per element and dyadic N).
inline std::vector<ExperimentRecord> inequality_sweep(InequalityKind kind, const std::vector<CorpusEntry>& corpus,
                                                      const InequalityParams& params = {}) {
  std::vector<ExperimentRecord> out;
  for (const auto& entry : corpus) {
    const GridFunction& u = entry.u;
    const Lattice& lat = u.lattice();
    const int d = lat.dim();
    const double h = lat.spacing();
    auto base = [&] {
      ExperimentRecord rec;
      rec.experiment = to_string(kind);
      rec.h = h;
      rec.metadata["profile"] = entry.tag;
      rec.metadata["d"] = std::to_string(d);
      return rec;
    };
    switch (kind) {
      case InequalityKind::sobolev: {
        detail::check_sobolev_hypothesis(params.s, d, "sobolev");
        if (!(params.epsilon > 0.0)) throw DomainError("sobolev: requires epsilon > 0");
        const double q = exponent_for(params.s, d);
        const double lhs = lebesgue_norm(u, q);
        const double rhs = sobolev_norm(u, params.s + params.epsilon);
        auto rec = base();
        rec.q = q;
        rec.epsilon = params.epsilon;
        rec.value = lhs;
        rec.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        out.push_back(std::move(rec));
        break;
      }
      case InequalityKind::gagliardo_nirenberg: {
        if (!(params.theta > 0.0 && params.theta < 1.0))
          throw DomainError("gagliardo_nirenberg: requires 0 < theta < 1, got theta = " + format_double(params.theta));
        const double p = exponent_for(params.theta, d);
        if (!(p > 1.0)) throw DomainError("gagliardo_nirenberg: requires 1 < p <= inf");
        const double lhs = lebesgue_norm(u, p);
        const double rhs = std::pow(lebesgue_norm(u, 2.0), 1.0 - params.theta) * std::pow(sobolev_norm(u, 1.0), params.theta);
        auto rec = base();
        rec.q = p;
        rec.value = lhs;
        rec.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        rec.metadata["theta"] = format_double(params.theta);
        out.push_back(std::move(rec));
        break;
      }
      case InequalityKind::bernstein: {
        const double s = params.bernstein_s < 0.0 ? d / 2.0 : params.bernstein_s;
        detail::check_sobolev_hypothesis(s, d, "bernstein");
        const double q = exponent_for(s, d);
        const double l2 = lebesgue_norm(u, 2.0);
        for (const auto& N : DyadicScale::all(lat)) {
          const double lhs = lebesgue_norm(lp_project(u, N), q);
          const double rhs = std::pow(N.value() / h, s) * l2;
          auto rec = base();
          rec.N = N.value();
          rec.q = q;
          rec.value = lhs;
          rec.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
          out.push_back(std::move(rec));
        }
        break;
      }
    }
  }
  return out;
}

/// Functions chosen to push the inequality constants: smooth bumps transported by
/// d_h, band-limited white noise, single modes (lowest and top), the indicator of
/// the top dyadic annulus (near-extremizer for Bernstein), and a point mass.
inline std::vector<CorpusEntry> stress_corpus(const Lattice& lat, std::uint64_t seed = 1) {
  const int d = lat.dim();
  const int M = lat.half_size();
  std::vector<CorpusEntry> out;
  out.push_back({"gaussian_w0.8", discretize(*wrapped_gaussian(d, {0.2, -0.4}, 0.8), lat)});
  out.push_back({"gaussian_w0.3", discretize(*wrapped_gaussian(d, {-1.0, 0.5}, 0.3), lat)});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int band = std::max(1, M / 2);
  const auto noise = SpectrumFunction::generate(lat, [&](const MultiIndex& k) {
    const bool inside = std::abs(k[0]) <= band && (d == 1 || std::abs(k[1]) <= band);
    const cplx z(normal(rng), normal(rng));
    return inside ? z : cplx(0.0);
  });
  out.push_back({"bandlimited_noise", inverse(noise)});

  out.push_back({"mode_low", GridFunction::generate(lat, [](const Point& x) { return std::polar(1.0, x[0]); })});
  out.push_back({"mode_top", GridFunction::generate(lat, [&](const Point& x) {
                   return std::polar(1.0, (M - 1) * (x[0] + (d == 2 ? x[1] : 0.0)));
                 })});

  const auto top = DyadicScale::all(lat).back();
  const auto annulus = SpectrumFunction::generate(lat, [&](const MultiIndex& k) {
    return in_annulus(k, d, top) ? cplx(1.0) : cplx(0.0);
  });
  out.push_back({"top_annulus", inverse(annulus)});

  GridFunction delta(lat);
  delta.at({0, 0}) = 1.0 / lat.cell_volume();
  out.push_back({"point_mass", std::move(delta)});
  return out;
}

}  // namespace lnls
