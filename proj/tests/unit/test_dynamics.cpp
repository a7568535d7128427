#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lnls/dynamics.hpp"
#include "lnls/reference.hpp"
#include "lnls/sampler.hpp"
#include "support/oracles.hpp"

namespace {

using namespace lnls;
constexpr double pi = std::numbers::pi;

GridFunction smooth_data(const Lattice& lat, double amplitude = 0.5) {
  return discretize(*wrapped_gaussian(lat.dim(), {0.4, -0.3}, 0.8, amplitude, {1, 0}), lat);
}

TEST(NlsParams, Validation) {
  EXPECT_THROW((NlsParams{0.5, 1}).validate(), DomainError);
  try {
    NlsParams{1.0, 1}.validate();
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("p > 1 required"), std::string::npos);
  }
  EXPECT_THROW((NlsParams{3.0, 2}).validate(), DomainError);
  EXPECT_TRUE((NlsParams{3.0, -1}).hypothesis_warning(2).has_value());
  EXPECT_FALSE((NlsParams{2.5, -1}).hypothesis_warning(2).has_value());
  EXPECT_FALSE((NlsParams{5.0, 1}).hypothesis_warning(2).has_value());
}

TEST(LinearFlow, UnitaryGroupAndReversible) {
  const Lattice lat(2, 16);
  const auto u = oracle::random_grid(lat, 1);
  EXPECT_LE(oracle::relative_gap(linear_flow(u, 0.0), u), 1e-14);
  EXPECT_NEAR(lebesgue_norm(linear_flow(u, 1.7), 2.0) / lebesgue_norm(u, 2.0), 1.0, 1e-12);
  EXPECT_LE(oracle::relative_gap(linear_flow(linear_flow(u, 0.3), 0.9), linear_flow(u, 1.2)), 1e-12);
  EXPECT_LE(oracle::relative_gap(linear_flow(linear_flow(u, 2.1), -2.1), u), 1e-12);
}

TEST(NonlinearPhase, ClosedFormAndModulus) {
  const Lattice lat(1, 4);
  const cplx A(0.6, -0.8);
  const GridFunction c = GridFunction::generate(lat, [&](const Point&) { return A; });
  const auto out = nonlinear_phase_step(c, {3.0, 1}, 0.5);
  for (std::size_t s = 0; s < out.size(); ++s) EXPECT_NEAR(std::abs(out[s] - A * std::polar(1.0, -0.5)), 0.0, 1e-15);
  const auto u = oracle::random_grid(Lattice(2, 8), 3);
  const auto v = nonlinear_phase_step(u, {2.5, -1}, 0.37);
  for (std::size_t s = 0; s < u.size(); ++s) EXPECT_NEAR(std::abs(v[s]), std::abs(u[s]), 4e-16 * std::abs(u[s]));
  EXPECT_EQ(lebesgue_norm(nonlinear_phase_step(GridFunction(lat), {3.0, 1}, 1.0), kInfinity), 0.0);
}

TEST(Strang, PlaneWaveOrbit) {
  for (int d : {1, 2}) {
    const Lattice lat(d, 16);
    const MultiIndex k0{3, d == 2 ? -2 : 0};
    const cplx A = 0.7;
    for (const NlsParams params : {NlsParams{3.0, 1}, NlsParams{2.5, -1}, NlsParams{5.0, 1}}) {
      const auto samples = GridFunction::generate(lat, [&](const Point& x) {
        return A * std::polar(1.0, k0[0] * x[0] + k0[1] * x[1]);
      });
      const double omega = laplacian_symbol_value(k0, d, lat.spacing()) + params.lambda * std::pow(std::abs(A), params.p - 1);
      const double dt = 1e-3;
      GridFunction u = samples;
      const StrangStepper stepper(lat, params, dt);
      for (int n = 0; n < 1000; ++n) u = stepper.step(u);
      const auto exact = std::polar(1.0, -omega * 1000 * dt) * samples;
      EXPECT_LE(lebesgue_norm(u - exact, 2.0), 1e-10) << "d=" << d << " p=" << params.p;
    }
  }
}

TEST(Strang, MassConservedOverManySteps) {
  const Lattice lat(2, 8);
  auto u = oracle::random_grid(lat, 21);
  u *= 0.3;
  const NlsParams params{3.0, 1};
  const double m0 = conserved(u, params).mass;
  const StrangStepper stepper(lat, params, 1e-3);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    u = stepper.step(u);
    if (n % 100 == 99) worst = std::max(worst, std::abs(conserved(u, params).mass - m0) / m0);
  }
  EXPECT_LE(worst, 1e-11);
}

TEST(Strang, GaugeCovariance) {
  const Lattice lat(2, 8);
  const auto u = smooth_data(lat);
  const cplx g = std::polar(1.0, 0.9);
  const NlsParams params{3.0, 1};
  EXPECT_LE(oracle::relative_gap(step_strang(g * u, params, 0.01), g * step_strang(u, params, 0.01)), 1e-13);
  EXPECT_LE(oracle::relative_gap(step_rk4(g * u, params, 0.01), g * step_rk4(u, params, 0.01)), 1e-13);
  EXPECT_LE(oracle::relative_gap(picard_iterate(g * u, params, 0.01), g * picard_iterate(u, params, 0.01)), 1e-12);
}

TEST(Rk4, StabilityLimitAndZero) {
  const Lattice lat(1, 8);
  const NlsParams params{3.0, 1};
  EXPECT_THROW(step_rk4(smooth_data(lat), params, 0.1), DomainError);
  EXPECT_EQ(lebesgue_norm(step_rk4(GridFunction(lat), params, 0.01), kInfinity), 0.0);
}

TEST(Rk4, AgreesWithStrangOverUnitTime) {
  const Lattice lat(1, 8);
  const auto u0 = smooth_data(lat);
  const NlsParams params{3.0, 1};
  const EvolutionConfig strang{1e-4, 1.0, Integrator::strang, 10000};
  const EvolutionConfig rk4{1e-4, 1.0, Integrator::rk4, 10000};
  const auto a = evolve(u0, params, strang).snapshots.back().u;
  const auto b = evolve(u0, params, rk4).snapshots.back().u;
  EXPECT_LE(lebesgue_norm(a - b, 2.0), 1e-6);
}

TEST(Rk4, PlaneWavePhaseIsFourthOrder) {
  const Lattice lat(1, 8);
  const NlsParams params{3.0, 1};
  const cplx A = 0.8;
  const auto u0 = GridFunction::generate(lat, [&](const Point& x) { return A * std::polar(1.0, 2 * x[0]); });
  const double omega = laplacian_symbol_value({2, 0}, 1, lat.spacing()) + std::norm(A);
  const auto error = [&](double dt) {
    const auto u = evolve(u0, params, {dt, 0.5, Integrator::rk4, 1000000}).snapshots.back().u;
    return lebesgue_norm(u - std::polar(1.0, -omega * 0.5) * u0, 2.0);
  };
  const double ratio = error(0.02) / error(0.01);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Picard, FreeLimitContractionAndCrossCheck) {
  const Lattice lat(1, 8);
  const auto u0 = smooth_data(lat, 0.3);
  const auto free = picard_iterate(u0, NlsParams::linear(), 0.05);
  EXPECT_LE(lebesgue_norm(free - linear_flow(u0, 0.05), 2.0), 1e-12);

  const NlsParams params{3.0, 1};
  const auto trace = picard_trace(u0, params, 0.01);
  EXPECT_LT(trace.contraction_factor, 1.0);
  for (std::size_t i = 1; i + 1 < trace.increments.size(); ++i) {
    if (trace.increments[i] < 1e-15) break;
    EXPECT_LT(trace.increments[i], trace.increments[i - 1] * std::max(trace.contraction_factor, 0.5));
  }
  const auto strang = evolve(u0, params, {1e-4, 0.01, Integrator::strang, 1000}).snapshots.back().u;
  EXPECT_LE(lebesgue_norm(trace.solution - strang, 2.0), 1e-6);

  try {
    picard_iterate(u0, params, 100.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("need T <"), std::string::npos);
  }
}

TEST(Conserved, ClosedFormsAndKineticIdentity) {
  EXPECT_EQ(conserved(GridFunction(Lattice(2, 4)), {3.0, 1}).mass, 0.0);
  EXPECT_EQ(conserved(GridFunction(Lattice(2, 4)), {3.0, 1}).energy, 0.0);
  const double A = 0.7;
  const auto c = GridFunction::generate(Lattice(2, 8), [&](const Point&) { return cplx(A); });
  for (const NlsParams params : {NlsParams{3.0, 1}, NlsParams{2.5, -1}}) {
    const auto q = conserved(c, params);
    EXPECT_NEAR(q.mass, 4 * pi * pi * A * A, 1e-12);
    EXPECT_NEAR(q.energy, params.lambda / (params.p + 1) * 4 * pi * pi * std::pow(A, params.p + 1), 1e-12);
  }
  const auto u = oracle::random_grid(Lattice(2, 8), 8);
  const double kinetic = conserved(u, NlsParams::linear()).energy;
  EXPECT_NEAR(kinetic / (0.5 * std::pow(forward_gradient_norm(u), 2)), 1.0, 1e-12);
}

TEST(Evolve, ZeroHorizonStrideAndDeterminism) {
  const Lattice lat(2, 8);
  const auto u0 = smooth_data(lat);
  const auto none = evolve(u0, {3.0, 1}, {0.01, 0.0, Integrator::strang, 1});
  ASSERT_EQ(none.snapshots.size(), 1u);
  EXPECT_EQ(oracle::relative_gap(none.snapshots[0].u, u0), 0.0);
  const auto a = evolve(u0, {3.0, 1}, {0.01, 0.105, Integrator::strang, 4});
  // 11 steps of 0.105/11, snapshots at 0, 4, 8 and the final step
  ASSERT_EQ(a.snapshots.size(), 4u);
  EXPECT_DOUBLE_EQ(a.snapshots.back().t, 0.105);
  const auto b = evolve(u0, {3.0, 1}, {0.01, 0.105, Integrator::strang, 4});
  EXPECT_EQ(oracle::relative_gap(a.snapshots.back().u, b.snapshots.back().u), 0.0);
  EXPECT_THROW(evolve(u0, {3.0, 1}, {-1.0, 1.0, Integrator::strang, 1}), DomainError);
}

TEST(Evolve, EnergyDriftIsSecondOrder) {
  const Lattice lat(2, 16);
  const auto u0 = smooth_data(lat, 0.8);
  const NlsParams params{3.0, 1};
  const auto drift = [&](double dt) {
    const auto traj = evolve(u0, params, {dt, 1.0, Integrator::strang, 1});
    double worst = 0.0;
    for (const auto& s : traj.snapshots) worst = std::max(worst, std::abs(s.conserved.energy - traj.snapshots[0].conserved.energy));
    return worst;
  };
  const double ratio = drift(0.02) / drift(0.01);
  EXPECT_GE(ratio, 3.2);
  EXPECT_LE(ratio, 4.8);
}

TEST(Evolve, FocusingSubcriticalStaysBounded) {
  const Lattice lat(2, 16);
  const auto u0 = smooth_data(lat, 0.6);
  const NlsParams params{2.5, -1};
  const auto traj = evolve(u0, params, {0.005, 10.0, Integrator::strang, 20});
  const double h1_0 = sobolev_norm(u0, 1.0);
  double worst = 0.0;
  for (const auto& s : traj.snapshots) worst = std::max(worst, sobolev_norm(s.u, 1.0));
  EXPECT_LE(worst, 10 * h1_0);
}

TEST(Evolve, ToTimesMatchesEvolve) {
  const Lattice lat(1, 16);
  const auto u0 = smooth_data(lat);
  const NlsParams params{3.0, 1};
  const auto states = evolve_to_times(u0, params, 0.01, Integrator::strang, {0.0, 0.25, 0.5});
  ASSERT_EQ(states.size(), 3u);
  EXPECT_EQ(oracle::relative_gap(states[0], u0), 0.0);
  const auto direct = evolve(u0, params, {0.01, 0.5, Integrator::strang, 1000}).snapshots.back().u;
  EXPECT_LE(oracle::relative_gap(states[2], direct), 1e-12);
  EXPECT_THROW(evolve_to_times(u0, params, 0.01, Integrator::strang, {0.5, 0.25}), DomainError);
}

TEST(TimeAverage, TrapezoidOnConstantNorm) {
  const Lattice lat(1, 8);
  const auto e = GridFunction::generate(lat, [](const Point& x) { return std::polar(1.0, x[0]); });
  const auto traj = evolve(e, NlsParams::linear(), {0.1, 2.0, Integrator::strang, 1});
  EXPECT_NEAR(time_averaged_norm(traj, 2.0, kInfinity), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(time_averaged_norm(traj, kInfinity, 2.0), std::sqrt(2 * pi), 1e-12);
  EXPECT_EQ(default_time_exponent(2.5), 2.0);
  EXPECT_EQ(default_time_exponent(3.0), 3.0);
}

TEST(Reference, ReproducesDataAndPlaneWaves) {
  const auto g = wrapped_gaussian(1, {0.2, 0.0}, 0.5);
  const SpectralNlsSolver solver(1, 64, {3.0, 1}, 1e-3);
  const auto at0 = solver.solve(*g, {0.0}).front();
  const Lattice fine(1, 32);
  for (std::size_t s = 0; s < fine.size(); ++s) EXPECT_NEAR(std::abs((*at0)(fine.point(s)) - (*g)(fine.point(s))), 0.0, 1e-12);

  const MultiIndex k0{2, -1};
  const double t = 0.7;
  const auto free = reference_solution(*plane_wave(2, k0), NlsParams::linear(), t, {256, 1e-3, 1e-6, true});
  const cplx expected_phase = std::polar(1.0, -5.0 * t);
  for (const Point x : {Point{0.1, 0.2}, Point{-1.3, 2.2}})
    EXPECT_NEAR(std::abs((*free)(x) - std::polar(1.0, 2 * x[0] - x[1]) * expected_phase), 0.0, 1e-12);

  const cplx A = 0.6;
  for (const NlsParams params : {NlsParams{3.0, 1}, NlsParams{2.5, -1}}) {
    const auto nl = reference_solution(*plane_wave(1, {3, 0}, A), params, t, {64, 1e-2, 1e-6, true});
    const double omega = 9.0 + params.lambda * std::pow(std::abs(A), params.p - 1);
    for (double x : {0.3, -2.0})
      EXPECT_NEAR(std::abs((*nl)({x, 0.0}) - A * std::polar(1.0, 3 * x - omega * t)), 0.0, 1e-9);
  }
  EXPECT_THROW(SpectralNlsSolver(2, 128, {3.0, 1}, 1e-3), DomainError);
  EXPECT_THROW(SpectralNlsSolver(1, 100, {3.0, 1}, 1e-3), DomainError);
}

TEST(Reference, SelfConvergenceFailureIsReported) {
  // A narrow Gaussian is far from resolved on 16 points.
  const auto narrow = wrapped_gaussian(1, {0.0, 0.0}, 0.05);
  EXPECT_THROW(reference_solution(*narrow, {3.0, 1}, 0.1, {16, 1e-3, 1e-6, true}), AccuracyError);
}

}  // namespace
