#include <gtest/gtest.h>

#include <cmath>

#include "lplab/paraproduct.hpp"
#include "lplab/random.hpp"
#include "test_support.hpp"

using namespace lplab;
using lplab::testing::rel_l2;

namespace {

Field band_field(const Grid& g, std::uint64_t seed, int comps = 1) {
  return random_field(g, comps, {0.0, dealiased_radius(g), 0.0}, seed);
}

// T_u v as the double sum over blocks j' <= j - 2, one dealiased product per pair.
Field brute_force_T(const Field& u, const Field& v) {
  const auto bu = blocks(u);
  const auto bv = blocks(v);
  Field out = zeros_like(to_spectral(dealiased_product(u, v)));
  const int count = static_cast<int>(bu.size());
  for (int b = 0; b < count; ++b) {
    for (int a = 0; a + 2 <= b; ++a) out += dealiased_product(bu[a], bv[b]);
  }
  return out;
}

Field brute_force_R(const Field& u, const Field& v) {
  const auto bu = blocks(u);
  const auto bv = blocks(v);
  Field out = zeros_like(to_spectral(dealiased_product(u, v)));
  const int count = static_cast<int>(bu.size());
  for (int a = 0; a < count; ++a) {
    for (int b = std::max(0, a - 1); b <= std::min(count - 1, a + 1); ++b) {
      out += dealiased_product(bu[a], bv[b]);
    }
  }
  return out;
}

}  // namespace

TEST(Paraproduct, MatchesBlockDoubleSum) {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 32);
    const Field u = band_field(g, 1);
    const Field v = band_field(g, 2);
    const Field t = paraproduct_T(u, v);
    EXPECT_LE(rel_l2(t, brute_force_T(u, v)), 1e-12);
    EXPECT_LE(rel_l2(remainder_R(u, v), brute_force_R(u, v)), 1e-12);
  }
}

TEST(Paraproduct, ConstantLowFactor) {
  const Grid g(2, 64);
  const Field c = sample_scalar(g, [](double, double, double) { return 2.5; });
  const Field v = band_field(g, 3);
  // Only Delta_{-1}c is nonzero, so T_c v = c (v - S_1 v).
  const Field expected = 2.5 * (to_spectral(v) - s_j(v, 1));
  EXPECT_LE(rel_l2(paraproduct_T(c, v), expected), 1e-12);
  EXPECT_EQ(max_coeff(paraproduct_T(v, Field::scalar(g))), 0.0);
  EXPECT_EQ(max_coeff(paraproduct_T(Field::scalar(g), v)), 0.0);
}

TEST(Paraproduct, SummandsLiveInTheirAnnulus) {
  const Grid g(2, 128);
  const Field u = band_field(g, 4);
  const Field v = band_field(g, 5);
  const auto& lat = lattice(g);
  for (int j = 1; j <= g.j_max(); ++j) {
    const Field piece = dealiased_product(s_j(u, j - 1), delta_j(v, j));
    const double inner = std::ldexp(1.0, j) / 12.0;
    const double outer = std::ldexp(1.0, j) * 10.0 / 3.0;
    auto co = piece.coeffs();
    double outside = 0.0;
    for (std::size_t i = 0; i < co.size(); ++i) {
      if (lat.radius[i] <= inner || lat.radius[i] >= outer) outside = std::max(outside, std::abs(co[i]));
    }
    EXPECT_LE(outside, 1e-14 * max_coeff(piece)) << "j=" << j;
  }
}

TEST(Paraproduct, BonyIdentityOnRandomPairs) {
  const Grid g(2, 32);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Field u = band_field(g, 100 + s);
    const Field v = band_field(g, 300 + s);
    const auto parts = bony_decomposition(u, v);
    const Field residual = parts.T_uv + parts.T_vu + parts.R_uv - dealiased_product(u, v);
    worst = std::max(worst, l2_norm(residual) / (l2_norm(u) * sup_norm(v)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Paraproduct, BonyIdentityForVectorFields) {
  const Grid g(3, 32);
  const Field u = band_field(g, 7, 3);
  const Field v = band_field(g, 8, 3);
  const auto parts = bony_decomposition(u, v);
  EXPECT_LE(rel_l2(parts.T_uv + parts.T_vu + parts.R_uv, dealiased_product(u, v)), 1e-12);
  EXPECT_LE(rel_l2(t_prime(u, v), parts.T_uv + parts.R_uv), 1e-14);
}

TEST(Paraproduct, Bilinearity) {
  const Grid g(2, 64);
  const Field a = band_field(g, 11);
  const Field b = band_field(g, 12);
  const Field c = band_field(g, 13);
  const Field lhs_t = paraproduct_T(2.0 * a - 3.0 * b, c);
  const Field rhs_t = 2.0 * paraproduct_T(a, c) - 3.0 * paraproduct_T(b, c);
  EXPECT_LE(rel_l2(lhs_t, rhs_t), 1e-12);
  const Field lhs_t2 = paraproduct_T(c, 2.0 * a - 3.0 * b);
  const Field rhs_t2 = 2.0 * paraproduct_T(c, a) - 3.0 * paraproduct_T(c, b);
  EXPECT_LE(rel_l2(lhs_t2, rhs_t2), 1e-12);
  const Field lhs_r = remainder_R(a, 0.5 * b + c);
  const Field rhs_r = 0.5 * remainder_R(a, b) + remainder_R(a, c);
  EXPECT_LE(rel_l2(lhs_r, rhs_r), 1e-12);
}

TEST(Paraproduct, RemainderOfSingleModeSquare) {
  // Every block of cos 2x sits in j in {0, 1}, so uu is all remainder: 1/2 + cos(4x)/2.
  const Grid g(2, 32);
  const Field u = sample_scalar(g, [](double x, double, double) { return std::cos(2.0 * x); });
  const Field r = remainder_R(u, u);
  const auto& lat = lattice(g);
  auto co = r.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) {
    const auto& k = lat.k[i];
    double want = 0.0;
    if (k[1] == 0 && k[0] == 0) want = 0.5;
    if (k[1] == 0 && std::abs(k[0]) == 4) want = 0.25;
    EXPECT_NEAR(std::abs(co[i]), want, 1e-15);
  }
  EXPECT_LE(max_coeff(paraproduct_T(u, u)), 1e-15);
}

TEST(Paraproduct, LowTimesHighIsAllParaproduct) {
  const Grid g(2, 64);
  const double kh = std::ldexp(1.0, g.j_max() - 1);
  const Field u = sample_scalar(g, [](double x, double y, double) { return std::cos(x) + 0.5 * std::sin(y); });
  const Field v = sample_scalar(g, [kh](double x, double, double) { return std::sin(kh * x); });
  const auto parts = bony_decomposition(u, v);
  EXPECT_LE(l2_norm(parts.T_vu), 1e-14 * l2_norm(parts.T_uv));
  EXPECT_LE(l2_norm(parts.R_uv), 1e-14 * l2_norm(parts.T_uv));
  EXPECT_LE(rel_l2(parts.T_uv, dealiased_product(u, v)), 1e-14);
}

TEST(Paraproduct, GridMismatch) {
  const Field a = Field::scalar(Grid(2, 16));
  const Field b = Field::scalar(Grid(2, 32));
  EXPECT_THROW(paraproduct_T(a, b), ShapeError);
  EXPECT_THROW(remainder_R(a, b), ShapeError);
}

TEST(Cancellation, TransportIsSkewForDivergenceFreeFields) {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 32);
    const Field v = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 21);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const Field w = band_field(g, 30 + s);
      const double pairing = inner(advect(v, w), w);
      const double scale = sup_norm(v) * l2_norm(w) * gradient_l2_norm(w);
      EXPECT_LE(std::abs(pairing), 1e-11 * scale);
      // Without the projection the pairing is generically nonzero.
      const Field rough = band_field(g, 50 + s, dim);
      EXPECT_GT(std::abs(inner(advect(rough, w), w)), 1e-6 * sup_norm(rough) * l2_norm(w) * gradient_l2_norm(w));
    }
  }
}

TEST(Cancellation, BlockTransportPairingVanishes) {
  const Grid g(3, 32);
  const Field v = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 22);
  const Field w = band_field(g, 23, 3);
  for (int j = 0; j <= g.j_max(); ++j) {
    const Field wj = delta_j(w, j);
    for (int jp = -1; jp <= g.j_max(); ++jp) {
      const Field vj = delta_j(v, jp);
      const double pairing = inner(advect(vj, wj), wj);
      const double scale = sup_norm(vj) * l2_norm(wj) * gradient_l2_norm(wj);
      EXPECT_LE(std::abs(pairing), 1e-11 * std::max(scale, 1e-300)) << j << "," << jp;
    }
  }
}

TEST(Commutator, ConstantTransportCommutes) {
  const Grid g(3, 32);
  const Field v = sample_vector(g, [](double, double, double) { return std::array<double, 3>{1.0, -2.0, 0.5}; });
  const Field w = band_field(g, 31, 3);
  const double scale = 2.0 * gradient_l2_norm(w);
  for (int j = 0; j <= g.j_max(); ++j) EXPECT_LE(l2_norm(commutator(v, j, w)), 1e-14 * scale) << j;
}

TEST(Commutator, MatchesParaproductRoute) {
  // [T_{v^i}, Delta_j] d_i w = T_{v^i} Delta_j d_i w - Delta_j T_{v^i} d_i w.
  const Grid g(2, 64);
  const Field v = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 41);
  const Field w = band_field(g, 42, 2);
  for (int j = 0; j <= g.j_max(); ++j) {
    Field route(g, 2, Representation::spectral);
    for (int m = 0; m < 2; ++m) {
      Field sum = Field::scalar(g);
      for (int i = 0; i < 2; ++i) {
        const Field dw = partial(w.component(m), i);
        sum += paraproduct_T(v.component(i), delta_j(dw, j)) - delta_j(paraproduct_T(v.component(i), dw), j);
      }
      route.set_component(m, sum);
    }
    const Field direct = commutator(v, j, w);
    EXPECT_LE(l2_norm(direct - route), 1e-12 * std::max(l2_norm(route), 1e-300)) << j;
  }
}

TEST(Commutator, LinearInTransport) {
  const Grid g(2, 64);
  const Field v = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, 43);
  const Field w = band_field(g, 44, 2);
  EXPECT_LE(rel_l2(commutator(2.0 * v, 2, w), 2.0 * commutator(v, 2, w)), 1e-12);
}

TEST(Commutator, RejectsBadArguments) {
  const Grid g(2, 32);
  const Field v = random_divfree(g, {0.0, 8.0, 0.0}, 45);
  const Field w = band_field(g, 46, 2);
  EXPECT_THROW(commutator(v, -1, w), RangeError);
  EXPECT_THROW(commutator(v, g.j_max() + 1, w), RangeError);
  EXPECT_THROW(commutator(band_field(g, 47, 2), 1, w), PreconditionError);
}

TEST(Commutator, BoundConstantIsUniformInJ) {
  // Smooth transport field; w localized to blocks j-1..j+1 so the window sum is not
  // dominated by the far blocks j+4. Block j = 0 holds only a handful of lattice modes.
  const Grid g(2, 128);
  std::vector<double> constants;
  for (int j = 1; j <= g.j_max(); ++j) {
    double c = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
      const Field v = random_divfree(g, {0.0, dealiased_radius(g), 6.0}, 500 + s);
      const Field full = band_field(g, 600 + s, 2);
      Field w(g, 2, Representation::spectral);
      for (int jp = j - 1; jp <= std::min(g.j_max(), j + 1); ++jp) w += delta_j(full, jp);
      double mass = 0.0;
      for (int jp = std::max(-1, j - 4); jp <= std::min(g.j_max(), j + 4); ++jp) mass += l2_norm(delta_j(w, jp));
      const double bound = gradient_sup_norm(s_j(v, j + 3)) * mass;
      c = std::max(c, l2_norm(commutator(v, j, w)) / bound);
    }
    constants.push_back(c);
  }
  const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LE(*hi / *lo, 4.0);
}
