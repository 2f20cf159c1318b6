#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "lplab/field.hpp"

namespace lplab::testing {

/// Max-norm distance between the physical samples of two fields.
inline double max_diff(const Field& a, const Field& b) {
  const Field pa = to_physical(a);
  const Field pb = to_physical(b);
  double m = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto sa = pa.samples(c);
    auto sb = pb.samples(c);
    for (std::size_t i = 0; i < sa.size(); ++i) m = std::max(m, std::abs(sa[i] - sb[i]));
  }
  return m;
}

/// Largest coefficient magnitude of a - b.
inline double coeff_diff(const Field& a, const Field& b) { return max_coeff(to_spectral(a) - b); }

inline double rel_l2(const Field& a, const Field& b) {
  const double ref = l2_norm(b);
  return l2_norm(a - b) / (ref > 0.0 ? ref : 1.0);
}

/// Sparse set of Fourier coefficients indexed by wavevector.
using Sparse = std::map<std::array<int, 3>, cplx>;

inline Sparse sparse_coeffs(const Field& f, double tol = 0.0) {
  const Field s = to_spectral(f);
  const auto& lat = lattice(f.grid());
  Sparse out;
  auto co = s.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (std::abs(co[i]) > tol) out[lat.k[i]] = co[i];
  }
  return out;
}

/// Exact coefficients of the product of two trigonometric polynomials (direct convolution).
inline Sparse convolve(const Sparse& a, const Sparse& b) {
  Sparse out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      out[{ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]}] += ca * cb;
    }
  }
  return out;
}

}  // namespace lplab::testing
