#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lplab/field.hpp"
#include "lplab/littlewood_paley.hpp"
#include "lplab/product.hpp"
#include "lplab/random.hpp"
#include "test_support.hpp"

using namespace lplab;
using lplab::testing::coeff_diff;
using lplab::testing::max_diff;

namespace {

const double pi = std::numbers::pi;

Field cos_x1(const Grid& g) {
  return sample_scalar(g, [](double x, double, double) { return std::cos(x); });
}

}  // namespace

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid(3, 12), ConfigError);
  EXPECT_THROW(Grid(3, 4), ConfigError);
  EXPECT_THROW(Grid(1, 16), ConfigError);
  EXPECT_NO_THROW(Grid(2, 8));
  EXPECT_EQ(Grid(3, 64).j_max(), 4);
  EXPECT_EQ(Grid(2, 128).j_max(), 5);
}

TEST(Transforms, SingleCosineModeHasHalfCoefficients) {
  const Grid g(3, 16);
  const Field f = to_spectral(cos_x1(g));
  const auto& lat = lattice(g);
  auto co = f.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) {
    const auto& k = lat.k[i];
    const bool hit = std::abs(k[0]) == 1 && k[1] == 0 && k[2] == 0;
    EXPECT_NEAR(co[i].real(), hit ? 0.5 : 0.0, 1e-15);
    EXPECT_NEAR(co[i].imag(), 0.0, 1e-15);
  }
}

TEST(Transforms, ZeroMapsToZero) {
  const Grid g(2, 16);
  const Field z(g, 1, Representation::physical);
  EXPECT_EQ(max_coeff(to_spectral(z)), 0.0);
}

TEST(Transforms, RandomRoundTripAndParseval) {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 16);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    Field f(g, 1, Representation::physical);
    for (auto& v : f.samples()) v = nd(rng);
    const Field back = to_physical(to_spectral(f));
    EXPECT_LE(max_diff(back, f), 1e-12 * sup_norm(f));

    // Parseval: quadrature L2 against the coefficient sum.
    const double quad = std::pow(lp_norm(f, 2.0), 2);
    const Field fs = to_spectral(f);
    double coeff_sum = 0.0;
    for (const auto& c : fs.coeffs()) coeff_sum += std::norm(c);
    EXPECT_LE(std::abs(quad - coeff_sum * g.volume()), 1e-10 * quad);
  }
}

TEST(Transforms, Linearity) {
  const Grid g(3, 16);
  const Field a = random_field(g, 1, {0.0, 6.0, 0.0}, 1);
  const Field b = random_field(g, 1, {0.0, 6.0, 0.0}, 2);
  const Field c = random_field(g, 1, {0.0, 6.0, 0.0}, 3);
  const Field lhs = to_physical(2.0 * a - 0.5 * b + c);
  const Field rhs = 2.0 * to_physical(a) - 0.5 * to_physical(b) + to_physical(c);
  EXPECT_LE(max_diff(lhs, rhs), 1e-12 * sup_norm(rhs));
  const Field dl = partial(2.0 * a + b, 1);
  const Field dr = 2.0 * partial(a, 1) + partial(b, 1);
  EXPECT_LE(max_diff(dl, dr), 1e-12 * sup_norm(dr));
}

TEST(LpNorm, ClosedForms) {
  const Grid g(3, 32);
  const Field s = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
  // (2 pi)^{3/2} / sqrt(2), frozen from tests/oracles/cutoff_oracles.py.
  EXPECT_NEAR(lp_norm(s, 2.0), 11.136655993663416, 1e-12);
  const double inf = lp_norm(s, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(inf, 1.0, 1.0 / (32.0 * 32.0));

  const Field c = sample_scalar(g, [](double, double, double) { return -1.5; });
  for (double p : {1.0, 3.0, 7.5}) {
    EXPECT_NEAR(lp_norm(c, p), 1.5 * std::pow(2.0 * pi, 3.0 / p), 1e-11);
  }
  EXPECT_THROW(lp_norm(c, 0.5), DomainError);
}

TEST(Derivative, SineToCosineAndConstants) {
  const Grid g(3, 16);
  const Field s = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
  EXPECT_LE(max_diff(partial(s, 0), cos_x1(g)), 1e-14);
  const Field c = sample_scalar(g, [](double, double, double) { return 4.0; });
  EXPECT_LE(sup_norm(partial(c, 0)), 1e-14);
}

TEST(Derivative, AgreesWithFourthOrderFiniteDifferences) {
  // Oracle: centered five-point stencil on the samples, error O(h^4).
  auto fd_error = [](int n) {
    const Grid g(2, n);
    const Field f = to_physical(random_field(g, 1, {0.0, 3.0, 0.0}, 5));
    const Field exact = to_physical(partial(f, 0));
    auto s = f.samples();
    auto e = exact.samples();
    const double h = g.spacing();
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto at = [&](int di) { return s[static_cast<std::size_t>(((i + di + n) % n) * n + j)]; };
        const double fd = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
        err = std::max(err, std::abs(fd - e[static_cast<std::size_t>(i * n + j)]));
      }
    }
    return err / sup_norm(exact);
  };
  const double coarse = fd_error(32);
  const double fine = fd_error(64);
  EXPECT_LT(fine, 1e-3);
  EXPECT_GT(coarse / fine, 12.0);  // 2^4 = 16 for a fourth-order stencil
}

TEST(Products, CosineSquaredHasModesAtZeroAndTwo) {
  const Grid g(3, 16);
  const Field f = cos_x1(g);
  const Field p = dealiased_product(f, f);
  const auto& lat = lattice(g);
  auto co = p.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) {
    const auto& k = lat.k[i];
    double expected = 0.0;
    if (k[1] == 0 && k[2] == 0 && k[0] == 0) expected = 0.5;
    if (k[1] == 0 && k[2] == 0 && std::abs(k[0]) == 2) expected = 0.25;
    EXPECT_NEAR(std::abs(co[i]), expected, 1e-15);
  }
}

TEST(Products, MultiplyingByOneIsIdentityOnRetainedModes) {
  const Grid g(3, 16);
  const Field f = random_field(g, 1, {0.0, 7.0, 0.0}, 9);
  const Field one = sample_scalar(g, [](double, double, double) { return 1.0; });
  EXPECT_LE(coeff_diff(dealiased_product(f, one), f), 1e-15 * max_coeff(f) * 10);
}

TEST(Products, MatchesExactConvolutionOfBandLimitedPolynomials) {
  const Grid g(2, 16);
  const double band = g.n() / 3.0;
  const Field f = random_field(g, 1, {0.0, band, 0.0}, 21);
  const Field h = random_field(g, 1, {0.0, band, 0.0}, 22);
  const auto exact = lplab::testing::convolve(lplab::testing::sparse_coeffs(f),
                                              lplab::testing::sparse_coeffs(h));
  const Field p = dealiased_product(f, h);
  const auto& lat = lattice(g);
  auto co = p.coeffs();
  double scale = 0.0;
  for (const auto& [k, c] : exact) scale = std::max(scale, std::abs(c));
  double worst = 0.0;
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (lat.nyquist[i]) continue;
    const auto it = exact.find(lat.k[i]);
    const cplx want = it == exact.end() ? cplx{0.0, 0.0} : it->second;
    worst = std::max(worst, std::abs(co[i] - want));
  }
  EXPECT_LE(worst, 1e-12 * scale);
}

TEST(Products, SupportStaysInsideTheSumset) {
  const Grid g(2, 32);
  // Two annular spectra: the product lives in the sumset only.
  const Field f = random_field(g, 1, {6.0, 8.0, 0.0}, 3);
  const Field h = random_field(g, 1, {0.0, 2.0, 0.0}, 4);
  const auto sf = lplab::testing::sparse_coeffs(f, 0.0);
  const auto sh = lplab::testing::sparse_coeffs(h, 0.0);
  const auto sum = lplab::testing::convolve(sf, sh);
  const Field p = dealiased_product(f, h);
  const auto& lat = lattice(g);
  auto co = p.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (sum.find(lat.k[i]) == sum.end()) EXPECT_LE(std::abs(co[i]), 1e-13);
  }
}

TEST(Products, GridMismatchIsAShapeError) {
  const Field a = Field::scalar(Grid(2, 16));
  const Field b = Field::scalar(Grid(2, 32));
  EXPECT_THROW(dealiased_product(a, b), ShapeError);
}

TEST(Products, AliasingShowsUpWithoutPadding) {
  const Grid g(2, 16);
  const Field f = random_field(g, 1, {5.0, 7.0, 0.0}, 8);
  const Field padded = dealiased_product(f, f, Dealiasing::padding);
  const Field naive = dealiased_product(f, f, Dealiasing::none);
  // Sums with |k_a| > 8 wrap around onto retained modes when products are not padded.
  EXPECT_GT(l2_norm(padded - naive), 1e-3 * l2_norm(padded));
}
