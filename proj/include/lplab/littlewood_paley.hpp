#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "lplab/cutoffs.hpp"
#include "lplab/field.hpp"

namespace lplab {

namespace detail {

/// Multipliers of the default cutoffs on a grid's lattice, cached per (grid, j, kind).
inline const std::vector<double>& cached_multiplier(const Grid& g, int j, bool low_pass) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, bool>, std::unique_ptr<std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{g.dim(), g.n(), j, low_pass}];
  if (!slot) {
    const auto& lat = lattice(g);
    const auto& cut = default_cutoffs();
    slot = std::make_unique<std::vector<double>>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      (*slot)[i] = low_pass ? cut.low_pass(j, lat.radius[i]) : cut.block(j, lat.radius[i]);
    }
  }
  return *slot;
}

}  // namespace detail

/// Delta_j f = phi(2^-j D) f, with Delta_{-1} = S_0 and Delta_j = 0 for j <= -2.
inline Field delta_j(const Field& f, int j, const DyadicCutoffs& cut = default_cutoffs()) {
  const int jmax = f.grid().j_max();
  if (j > jmax) {
    throw RangeError("block j=" + std::to_string(j) + " is not resolvable on " + describe(f.grid()) +
                     " (j_max=" + std::to_string(jmax) + ")");
  }
  const auto& lat = lattice(f.grid());
  if (j <= -2) return apply_multiplier(f, [](std::size_t) { return 0.0; });
  if (&cut == &default_cutoffs()) {
    const auto& m = detail::cached_multiplier(f.grid(), j, false);
    return apply_multiplier(f, [&](std::size_t i) { return m[i]; });
  }
  return apply_multiplier(f, [&](std::size_t i) { return cut.block(j, lat.radius[i]); });
}

/// S_j f = chi(2^-j D) f; S_j = 0 for j <= -1.
inline Field s_j(const Field& f, int j, const DyadicCutoffs& cut = default_cutoffs()) {
  if (j <= -1) return apply_multiplier(f, [](std::size_t) { return 0.0; });
  if (&cut == &default_cutoffs() && j <= f.grid().j_max() + 2) {
    const auto& m = detail::cached_multiplier(f.grid(), j, true);
    return apply_multiplier(f, [&](std::size_t i) { return m[i]; });
  }
  const auto& lat = lattice(f.grid());
  return apply_multiplier(f, [&](std::size_t i) { return cut.low_pass(j, lat.radius[i]); });
}

/// All blocks Delta_{-1} .. Delta_{j_max}; entry b holds j = b - 1.
inline std::vector<Field> blocks(const Field& f, const DyadicCutoffs& cut = default_cutoffs()) {
  std::vector<Field> out;
  const int jmax = f.grid().j_max();
  out.reserve(static_cast<std::size_t>(jmax + 2));
  const Field s = to_spectral(f);
  for (int j = -1; j <= jmax; ++j) out.push_back(delta_j(s, j, cut));
  return out;
}

/// S_0 f + sum_{j=0}^{j_max} Delta_j f. Equals f for fields band-limited below (3/4) 2^{j_max+1} = 3n/8.
inline Field reconstruct(const Field& f, const DyadicCutoffs& cut = default_cutoffs()) {
  const Field s = to_spectral(f);
  Field out = s_j(s, 0, cut);
  for (int j = 0; j <= f.grid().j_max(); ++j) out += delta_j(s, j, cut);
  out.set_solenoidal(f.solenoidal());
  return out;
}

/// ||Delta_j f||_p for j = -1 .. j_max (entry b holds j = b - 1). Each block is filtered straight into
/// one transform buffer; blocks with no coefficients are skipped.
inline std::vector<double> block_lp_norms(const Field& f, double p, const DyadicCutoffs& cut = default_cutoffs()) {
  if (!(p >= 1.0)) throw DomainError("Lebesgue exponent must satisfy p >= 1");
  const Field fs = to_spectral(f);
  const Grid& g = f.grid();
  const std::size_t np = g.size();
  const int comps = f.components();
  const auto& lat = lattice(g);
  std::vector<double> out(static_cast<std::size_t>(g.j_max() + 2), 0.0);
  std::vector<cplx> buffer(np), samples(np);
  std::vector<double> mag(np);
  std::vector<double> local(np);
  for (int j = -1; j <= g.j_max(); ++j) {
    const std::vector<double>* table = &cut == &default_cutoffs() ? &detail::cached_multiplier(g, j, false) : nullptr;
    if (!table) {
      for (std::size_t i = 0; i < np; ++i) local[i] = cut.block(j, lat.radius[i]);
    }
    const std::vector<double>& m = table ? *table : local;
    std::fill(mag.begin(), mag.end(), 0.0);
    bool any = false;
    // Real fields have Hermitian spectra, so two components share one inverse transform as real and imaginary part.
    for (int c = 0; c < comps; c += 2) {
      const bool pair = comps > 1 && c + 1 < comps;
      auto a = fs.coeffs(c);
      bool nonzero = false;
      if (pair) {
        auto b = fs.coeffs(c + 1);
        for (std::size_t i = 0; i < np; ++i) {
          buffer[i] = (a[i] + cplx(-b[i].imag(), b[i].real())) * m[i];
          nonzero = nonzero || buffer[i] != cplx(0.0, 0.0);
        }
      } else {
        for (std::size_t i = 0; i < np; ++i) {
          buffer[i] = a[i] * m[i];
          nonzero = nonzero || buffer[i] != cplx(0.0, 0.0);
        }
      }
      if (!nonzero) continue;
      any = true;
      fft::backward(g.dim(), g.n(), buffer.data(), samples.data());
      if (comps == 1) {
        for (std::size_t i = 0; i < np; ++i) mag[i] = std::abs(samples[i].real());
      } else if (pair) {
        for (std::size_t i = 0; i < np; ++i) mag[i] += std::norm(samples[i]);
      } else {
        for (std::size_t i = 0; i < np; ++i) mag[i] += samples[i].real() * samples[i].real();
      }
    }
    if (!any) continue;
    if (comps > 1) {
      for (auto& v : mag) v = std::sqrt(v);
    }
    double value = 0.0;
    if (std::isinf(p)) {
      value = *std::max_element(mag.begin(), mag.end());
    } else if (p == 2.0) {
      for (double v : mag) value += v * v;
      value = std::sqrt(value * g.cell_volume());
    } else {
      for (double v : mag) value += std::pow(v, p);
      value = std::pow(value * g.cell_volume(), 1.0 / p);
    }
    out[static_cast<std::size_t>(j + 1)] = value;
  }
  return out;
}

/// Radius below which every resolved block sum is the identity.
inline double resolved_radius(const Grid& g) { return 0.75 * static_cast<double>(1 << (g.j_max() + 1)); }

/// Radius used for band-limited test data: the 2/3-rule band |k| <= n/3.
inline double dealiased_radius(const Grid& g) { return g.n() / 3.0; }

}  // namespace lplab
