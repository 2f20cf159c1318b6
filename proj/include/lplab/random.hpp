#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lplab/cutoffs.hpp"
#include "lplab/field.hpp"
#include "lplab/projection.hpp"

namespace lplab {

/// Radial band and per-mode power law of a random Fourier series.
struct SpectrumSpec {
  double k_min = 0.0;
  double k_max = 8.0;
  /// Coefficient variance scales like |k|^-slope.
  double slope = 0.0;
};

/// Real random field with i.i.d. complex Gaussian coefficients on k_min <= |k| <= k_max
/// (mean mode excluded), Hermitian-completed.
///
/// Draws are made over the cube [-K, K]^dim (K = floor(k_max)) in a fixed order,
/// so the same seed produces the same trigonometric polynomial on every grid
/// that resolves the band.
inline Field random_field(const Grid& g, int components, const SpectrumSpec& spec, std::uint64_t seed) {
  Field out(g, components, Representation::spectral);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int kmax = static_cast<int>(std::floor(spec.k_max));
  const int n = g.n();
  const int d = g.dim();
  auto flat = [&](const std::array<int, 3>& k) {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * n + static_cast<std::size_t>((k[a] + n) % n);
    return idx;
  };
  std::array<int, 3> k{0, 0, 0};
  const int span = 2 * kmax + 1;
  const int count = d == 2 ? span * span : span * span * span;
  for (int c = 0; c < count; ++c) {
    int rest = c;
    for (int a = d - 1; a >= 0; --a) {
      k[a] = rest % span - kmax;
      rest /= span;
    }
    // Keep one representative of each +-k pair: first nonzero component positive.
    int lead = 0;
    for (int a = 0; a < d && lead == 0; ++a) lead = k[a];
    if (lead <= 0) continue;
    double k2 = 0.0;
    bool fits = true;
    for (int a = 0; a < d; ++a) {
      k2 += static_cast<double>(k[a]) * k[a];
      fits = fits && std::abs(k[a]) < n / 2;
    }
    const double r = std::sqrt(k2);
    for (int comp = 0; comp < components; ++comp) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (!fits || r < spec.k_min || r > spec.k_max) continue;
      const double amp = std::pow(r, -0.5 * spec.slope) / std::sqrt(2.0);
      const cplx value{amp * re, amp * im};
      std::array<int, 3> minus{-k[0], -k[1], -k[2]};
      out.coeffs(comp)[flat(k)] = value;
      out.coeffs(comp)[flat(minus)] = std::conj(value);
    }
  }
  return out;
}

/// Divergence-free random vector field (Leray-projected random_field).
inline Field random_divfree(const Grid& g, const SpectrumSpec& spec, std::uint64_t seed) {
  return leray_project(random_field(g, g.dim(), spec, seed));
}

/// Random real field whose spectrum sits inside the block Delta_j: Delta_j applied to
/// one to three point masses with Gaussian weights at uniform positions. These
/// concentrated packets are near-extremal for Bernstein-type ratios.
inline Field random_block_field(const Grid& g, int j, std::mt19937_64& rng,
                                const DyadicCutoffs& cut = default_cutoffs()) {
  std::uniform_int_distribution<int> count_dist(1, 3);
  std::uniform_real_distribution<double> pos(0.0, two_pi);
  std::normal_distribution<double> weight(0.0, 1.0);
  const int packets = count_dist(rng);
  std::array<double, 3> centers[3]{};
  double weights[3]{};
  for (int m = 0; m < packets; ++m) {
    for (int a = 0; a < 3; ++a) centers[m][a] = pos(rng);
    weights[m] = weight(rng);
  }
  Field out = Field::scalar(g);
  auto co = out.coeffs();
  const auto& lat = lattice(g);
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (lat.nyquist[i]) continue;
    const double mult = cut.block(j, lat.radius[i]);
    if (mult == 0.0) continue;
    cplx acc{0.0, 0.0};
    for (int m = 0; m < packets; ++m) {
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase -= lat.k[i][a] * centers[m][a];
      acc += weights[m] * cplx{std::cos(phase), std::sin(phase)};
    }
    co[i] = mult * acc;
  }
  return out;
}

}  // namespace lplab
