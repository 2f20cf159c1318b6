#pragma once

#include "lplab/field.hpp"

namespace lplab {

/// Leray projection onto divergence-free fields: c(k) -> c(k) - k (k.c(k)) / |k|^2.
/// The mean mode is left untouched; Nyquist planes are zeroed.
inline Field leray_project(const Field& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim()) throw ShapeError("leray_project expects a vector field");
  Field out = to_spectral(f);
  const auto& lat = lattice(g);
  const int d = g.dim();
  std::span<cplx> comp[3];
  for (int a = 0; a < d; ++a) comp[a] = out.coeffs(a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lat.nyquist[i]) {
      for (int a = 0; a < d; ++a) comp[a][i] = 0.0;
      continue;
    }
    if (lat.k2[i] == 0.0) continue;
    cplx kdotc{0.0, 0.0};
    for (int a = 0; a < d; ++a) kdotc += static_cast<double>(lat.k[i][a]) * comp[a][i];
    kdotc /= lat.k2[i];
    for (int a = 0; a < d; ++a) comp[a][i] -= static_cast<double>(lat.k[i][a]) * kdotc;
  }
  out.set_solenoidal(true);
  return out;
}

/// ||div f||_2, computed spectrally.
inline double divergence_norm(const Field& f) { return l2_norm(divergence(f)); }

}  // namespace lplab
