#include <gtest/gtest.h>

#include <cmath>

#include "lplab/littlewood_paley.hpp"
#include "lplab/navier_stokes.hpp"
#include "test_support.hpp"

using namespace lplab;
using lplab::testing::rel_l2;

namespace {

SolverConfig tg2d(double dt, double t_end) {
  SolverConfig c;
  c.dim = 2;
  c.n = 64;
  c.nu = 1.0;
  c.dt = dt;
  c.t_end = t_end;
  c.cadence = 10;
  return c;
}

SolverConfig random2d(double dt, double t_end) {
  SolverConfig c;
  c.dim = 2;
  c.n = 16;
  c.nu = 0.05;
  c.dt = dt;
  c.t_end = t_end;
  c.ic = InitialCondition::random_divfree;
  c.seed = 17;
  c.k_max = 5.0;
  c.slope = 2.0;
  c.amplitude = 1.0;
  c.cadence = 1000000;
  return c;
}

}  // namespace

TEST(Leray, KillsGradientsAndKeepsSolenoidalFields) {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 16);
    const Field phi = random_field(g, 1, {0.0, dealiased_radius(g), 0.0}, 1);
    const Field grad = gradient(phi);
    EXPECT_LE(l2_norm(leray_project(grad)), 1e-13 * l2_norm(grad));
    const Field v = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 2);
    EXPECT_LE(lplab::testing::coeff_diff(leray_project(v), v), 1e-15 * max_coeff(v));
    const Field f = random_field(g, dim, {0.0, dealiased_radius(g), 0.0}, 3);
    EXPECT_LE(divergence_norm(leray_project(f)), 1e-13 * gradient_l2_norm(f));
  }
}

TEST(Rhs, TaylorGreenNonlinearityIsAGradient) {
  const Grid g(2, 32);
  const Field u = taylor_green(g);
  EXPECT_LE(l2_norm(nonlinear_term(u)), 1e-14 * l2_norm(u));
  EXPECT_LE(rel_l2(nse_rhs(u, 0.7), -1.4 * u), 1e-13);
  EXPECT_EQ(max_coeff(nse_rhs(Field::vector(g), 1.0)), 0.0);
}

TEST(Rhs, AdvectionIsEnergyNeutral) {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 16);
    const Field u = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 4);
    const double scale = sup_norm(u) * l2_norm(u) * gradient_l2_norm(u);
    EXPECT_LE(std::abs(inner(advect(u, u), u)), 1e-11 * scale);
    EXPECT_LE(std::abs(inner(nonlinear_term(u), u)), 1e-11 * scale);
  }
}

TEST(Solver, TaylorGreenDecaysExactly) {
  const auto traj = run(tg2d(0.01, 0.5));
  const Field& u0 = traj.snapshots.front().u;
  const Field exact = std::exp(-1.0) * u0;  // exp(-2 nu t)
  EXPECT_NEAR(traj.snapshots.back().time, 0.5, 1e-15);
  EXPECT_LE(l2_norm(traj.snapshots.back().u - exact) / l2_norm(u0), 1e-8);
  EXPECT_LE(traj.energy_balance_residual(), 1e-6);
  EXPECT_EQ(traj.snapshots.size(), 6u);
}

TEST(Solver, StrongViscosityDecaysMonotonically) {
  auto c = random2d(0.01, 0.2);
  c.nu = 5.0;
  c.cadence = 1;
  const auto traj = run(c);
  for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
    EXPECT_LT(traj.diagnostics[i].energy, traj.diagnostics[i - 1].energy);
  }
}

TEST(Solver, FourthOrderInTime) {
  // Taylor-Green is integrated exactly by the integrating factor, so a random field is used.
  const double t_end = 0.4;
  const Field ref = run(random2d(t_end / 128, t_end)).snapshots.back().u;
  std::vector<double> errors;
  for (int steps : {8, 16, 32}) {
    errors.push_back(l2_norm(run(random2d(t_end / steps, t_end)).snapshots.back().u - ref));
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  EXPECT_GE(order1, 3.5);
  EXPECT_GE(order2, 3.5);
}

TEST(Solver, InvariantsAlongARandomRun) {
  auto c = random2d(0.01, 0.5);
  c.cadence = 5;
  Field u0 = initial_condition(c);
  u0.coeffs(0)[0] = {0.3, 0.0};
  u0.coeffs(1)[0] = {-0.2, 0.0};
  const auto traj = run_from(c, u0);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    EXPECT_LE(traj.diagnostics[i].divergence, 1e-10);
    EXPECT_EQ(traj.snapshots[i].u.coeffs(0)[0], cplx(0.3, 0.0));
    EXPECT_EQ(traj.snapshots[i].u.coeffs(1)[0], cplx(-0.2, 0.0));
    if (i > 0) EXPECT_GT(traj.snapshots[i].time, traj.snapshots[i - 1].time);
  }
  EXPECT_LE(traj.energy_balance_residual(), 1e-6);
}

TEST(Solver, InviscidTimeReversal) {
  auto err_for = [](int steps) {
    auto c = random2d(0.2 / steps, 0.2);
    c.nu = 0.0;
    const Field u0 = initial_condition(c);
    const Field forward = run_from(c, u0).snapshots.back().u;
    c.dt = -c.dt;
    c.t_end = -c.t_end;
    const Field back = run_from(c, forward).snapshots.back().u;
    return l2_norm(back - u0) / l2_norm(u0);
  };
  const double coarse = err_for(5);
  const double fine = err_for(10);
  EXPECT_LE(fine, 1e-5);
  EXPECT_GE(std::log2(coarse / fine), 3.5);
}

TEST(Solver, RejectsBadConfigs) {
  auto c = tg2d(0.01, 0.5);
  c.dt = 0.03;
  EXPECT_THROW(validate(c), ConfigError);
  c = tg2d(-0.01, -0.5);
  EXPECT_THROW(validate(c), ConfigError);
  c = tg2d(0.01, 0.5);
  c.cadence = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c.cadence = 1;
  c.n = 48;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(parse_initial_condition("vortex"), ConfigError);
}

TEST(Solver, AbortsOnCflViolation) {
  auto c = tg2d(0.1, 0.5);
  c.amplitude = 50.0;
  EXPECT_THROW(run(c), NumericalAbort);
}

TEST(Solver, AbortsOnNonFiniteState) {
  auto c = tg2d(0.01, 0.05);
  Field u0 = initial_condition(c);
  u0.coeffs(0)[5] = {std::nan(""), 0.0};
  EXPECT_THROW(run_from(c, u0), NumericalAbort);
}

TEST(Twin, ZeroPerturbationGivesIdenticalRuns) {
  auto c = random2d(0.02, 0.2);
  c.cadence = 2;
  const auto [u, v] = twin_run(c, 0.0, 5);
  ASSERT_EQ(u.snapshots.size(), v.snapshots.size());
  for (std::size_t i = 0; i < u.snapshots.size(); ++i) {
    EXPECT_EQ(u.snapshots[i].time, v.snapshots[i].time);
    const auto a = u.snapshots[i].u.all_coeffs();
    const auto b = v.snapshots[i].u.all_coeffs();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST(Twin, PerturbationSizeAndDifferenceEquation) {
  auto residual_for = [](double dt) {
    auto c = random2d(dt, 0.4);
    c.cadence = 1;
    const auto [u, v] = twin_run(c, 1e-2, 9);
    const double w0 = l2_norm(u.snapshots.front().u - v.snapshots.front().u);
    EXPECT_NEAR(w0, 1e-2 * l2_norm(u.snapshots.front().u), 1e-12 * w0);
    return difference_residual(u, v, u.snapshots.size() / 2);
  };
  const double coarse = residual_for(0.02);
  const double fine = residual_for(0.01);
  EXPECT_LE(fine, 1e-5);
  EXPECT_GE(std::log2(coarse / fine), 3.5);
}
