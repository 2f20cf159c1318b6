#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "lplab/littlewood_paley.hpp"
#include "lplab/product.hpp"
#include "lplab/projection.hpp"

namespace lplab {

/// uv = T_u v + T_v u + R(u, v).
struct BonyParts {
  Field T_uv;
  Field T_vu;
  Field R_uv;
};

namespace detail {

inline int product_components(const Field& u, const Field& v, const char* what) {
  if (!(u.grid() == v.grid())) {
    throw ShapeError(std::string(what) + ": fields live on different grids (" + describe(u.grid()) + " vs " +
                     describe(v.grid()) + ")");
  }
  if (u.components() != v.components() && u.components() != 1 && v.components() != 1) {
    throw ShapeError(std::string(what) + ": incompatible component counts");
  }
  return std::max(u.components(), v.components());
}

// sum_k a[k] * b[k], component-wise with scalar broadcast, one transform per output component.
inline Field sum_of_products(const Grid& g, int comps, const std::vector<Field>& a, const std::vector<Field>& b,
                             Dealiasing rule) {
  Field out(g, comps, Representation::spectral);
  for (int c = 0; c < comps; ++c) {
    ProductAccumulator acc(g, rule);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Field ak = a[k].components() == 1 ? a[k] : a[k].component(c);
      const Field bk = b[k].components() == 1 ? b[k] : b[k].component(c);
      acc.add(ak, bk);
    }
    out.set_component(c, acc.finish());
  }
  return out;
}

}  // namespace detail

/// T_u v = sum_{j=1}^{j_max} S_{j-1}u Delta_j v. The j <= 0 terms vanish since S_{-1} = S_{-2} = 0.
inline Field paraproduct_T(const Field& u, const Field& v, Dealiasing rule = Dealiasing::padding) {
  const int comps = detail::product_components(u, v, "paraproduct_T");
  const Field us = to_spectral(u);
  const Field vs = to_spectral(v);
  std::vector<Field> low, high;
  for (int j = 1; j <= u.grid().j_max(); ++j) {
    low.push_back(s_j(us, j - 1));
    high.push_back(delta_j(vs, j));
  }
  return detail::sum_of_products(u.grid(), comps, low, high, rule);
}

/// R(u, v) = sum_{|j'-j| <= 1} Delta_j u Delta_{j'} v over j, j' in [-1, j_max].
inline Field remainder_R(const Field& u, const Field& v, Dealiasing rule = Dealiasing::padding) {
  const int comps = detail::product_components(u, v, "remainder_R");
  const auto bu = blocks(u);
  const auto bv = blocks(v);
  const int count = static_cast<int>(bu.size());
  std::vector<Field> left, right;
  for (int b = 0; b < count; ++b) {
    Field near = bv[static_cast<std::size_t>(b)];
    if (b > 0) near += bv[static_cast<std::size_t>(b - 1)];
    if (b + 1 < count) near += bv[static_cast<std::size_t>(b + 1)];
    left.push_back(bu[static_cast<std::size_t>(b)]);
    right.push_back(std::move(near));
  }
  return detail::sum_of_products(u.grid(), comps, left, right, rule);
}

/// T'_u v = T_u v + R(u, v).
inline Field t_prime(const Field& u, const Field& v, Dealiasing rule = Dealiasing::padding) {
  return paraproduct_T(u, v, rule) + remainder_R(u, v, rule);
}

inline BonyParts bony_decomposition(const Field& u, const Field& v, Dealiasing rule = Dealiasing::padding) {
  return {paraproduct_T(u, v, rule), paraproduct_T(v, u, rule), remainder_R(u, v, rule)};
}

/// Divergence of v relative to its gradient; zero for constant fields.
inline bool is_divergence_free(const Field& v, double tol = 1e-12) {
  const double div = divergence_norm(v);
  return div <= tol * std::max(gradient_l2_norm(v), 1e-300);
}

/// sum_{|j'-j|<=4} sum_i ( S_{j'-1}v^i Delta_j(d_i w_{j'}) - Delta_j(S_{j'-1}v^i d_i w_{j'}) ),
/// evaluated with multipliers and dealiased products. w may be scalar or vector.
inline Field commutator(const Field& v, int j, const Field& w, Dealiasing rule = Dealiasing::padding) {
  const Grid& g = v.grid();
  if (v.components() != g.dim()) throw ShapeError("commutator: v must be a vector field");
  if (!(w.grid() == g)) throw ShapeError("commutator: fields live on different grids");
  if (j < 0 || j > g.j_max()) {
    throw RangeError("commutator: block j=" + std::to_string(j) + " outside [0, " + std::to_string(g.j_max()) +
                     "]");
  }
  if (!is_divergence_free(v)) throw PreconditionError("commutator: v is not divergence free");

  const Field vs = to_spectral(v);
  const Field ws = to_spectral(w);
  const int lo = std::max(-1, j - 4);
  const int hi = std::min(g.j_max(), j + 4);
  Field out(g, w.components(), Representation::spectral);
  for (int m = 0; m < w.components(); ++m) {
    const Field wm = ws.component(m);
    ProductAccumulator outer(g, rule);  // S v . Delta_j(d w_{j'})
    ProductAccumulator inner(g, rule);  // S v . d w_{j'}, localized afterwards
    for (int jp = lo; jp <= hi; ++jp) {
      const Field low = s_j(vs, jp - 1);
      if (max_coeff(low) == 0.0) continue;
      const Field block = delta_j(wm, jp);
      for (int i = 0; i < g.dim(); ++i) {
        const auto a = outer.lift(low.component(i));
        const Field dw = partial(block, i);
        outer.add(a, outer.lift(delta_j(dw, j)));
        inner.add(a, inner.lift(dw));
      }
    }
    out.set_component(m, outer.finish() - delta_j(inner.finish(), j));
  }
  return out;
}

}  // namespace lplab
