#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "lplab/field.hpp"

namespace lplab {

/// How pointwise products are formed from spectral data.
///  - padding:    3/2-rule zero padding; retained modes are exact.
///  - truncation: product on the base grid, then modes with |k_a| > n/3 zeroed (2/3 rule).
///  - none:       product on the base grid; aliasing is left in place.
enum class Dealiasing { padding, truncation, none };

inline const char* to_string(Dealiasing d) {
  switch (d) {
    case Dealiasing::padding: return "three-halves";
    case Dealiasing::truncation: return "two-thirds";
    case Dealiasing::none: return "none";
  }
  return "?";
}

inline Dealiasing parse_dealiasing(const std::string& s) {
  if (s == "three-halves" || s == "padding" || s == "3/2") return Dealiasing::padding;
  if (s == "two-thirds" || s == "truncation" || s == "2/3") return Dealiasing::truncation;
  if (s == "none") return Dealiasing::none;
  throw ConfigError("unknown dealiasing rule '" + s + "'");
}

namespace detail {

// Maps base-grid flat indices to product-grid flat indices. Nyquist entries map to -1.
struct ProductLayout {
  int m = 0;
  std::size_t total = 0;
  std::vector<long> scatter;
};

inline const ProductLayout& product_layout(const Grid& g, int m) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<ProductLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{g.dim(), g.n(), m}];
  if (slot) return *slot;
  auto layout = std::make_unique<ProductLayout>();
  layout->m = m;
  layout->total = 1;
  for (int a = 0; a < g.dim(); ++a) layout->total *= static_cast<std::size_t>(m);
  const auto& lat = lattice(g);
  layout->scatter.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lat.nyquist[i]) {
      layout->scatter[i] = -1;
      continue;
    }
    long flat = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const int k = lat.k[i][a];
      flat = flat * m + (k >= 0 ? k : k + m);
    }
    layout->scatter[i] = flat;
  }
  slot = std::move(layout);
  return *slot;
}

}  // namespace detail

/// Accumulates sums of pointwise products sum_i a_i b_i on the product grid and
/// transforms once at the end. All factors are scalar fields on one base grid.
class ProductAccumulator {
 public:
  ProductAccumulator(const Grid& g, Dealiasing rule)
      : grid_(g),
        rule_(rule),
        layout_(detail::product_layout(g, rule == Dealiasing::padding ? 3 * g.n() / 2 : g.n())),
        sum_(layout_.total, 0.0) {}

  const Grid& grid() const { return grid_; }
  Dealiasing rule() const { return rule_; }

  /// Physical samples of a scalar field on the product grid.
  std::vector<double> lift(const Field& scalar) const {
    if (scalar.components() != 1) throw ShapeError("products act on scalar components");
    if (!(scalar.grid() == grid_)) throw ShapeError("product factor lives on a different grid");
    const Field s = to_spectral(scalar);
    std::vector<cplx> padded(layout_.total, cplx{0.0, 0.0});
    auto co = s.coeffs();
    for (std::size_t i = 0; i < co.size(); ++i) {
      if (const long p = layout_.scatter[i]; p >= 0) padded[static_cast<std::size_t>(p)] = co[i];
    }
    std::vector<cplx> phys(layout_.total);
    fft::backward(grid_.dim(), layout_.m, padded.data(), phys.data());
    std::vector<double> out(layout_.total);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = phys[i].real();
    return out;
  }

  void add(std::span<const double> a, std::span<const double> b, double scale = 1.0) {
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += scale * a[i] * b[i];
  }

  void add(const Field& a, const Field& b, double scale = 1.0) {
    const auto la = lift(a);
    const auto lb = lift(b);
    add(la, lb, scale);
  }

  /// Spectral scalar field on the base grid holding the accumulated products.
  Field finish() const {
    std::vector<cplx> phys(layout_.total);
    for (std::size_t i = 0; i < phys.size(); ++i) phys[i] = cplx{sum_[i], 0.0};
    std::vector<cplx> spec(layout_.total);
    fft::forward(grid_.dim(), layout_.m, phys.data(), spec.data());
    const double norm = 1.0 / static_cast<double>(layout_.total);
    Field out = Field::scalar(grid_);
    auto co = out.coeffs();
    const auto& lat = lattice(grid_);
    const double cutoff = grid_.n() / 3.0;
    for (std::size_t i = 0; i < co.size(); ++i) {
      const long p = layout_.scatter[i];
      if (p < 0) continue;
      if (rule_ == Dealiasing::truncation) {
        bool outside = false;
        for (int a = 0; a < grid_.dim(); ++a) outside = outside || std::abs(lat.k[i][a]) > cutoff;
        if (outside) continue;
      }
      co[i] = spec[static_cast<std::size_t>(p)] * norm;
    }
    return out;
  }

 private:
  Grid grid_;
  Dealiasing rule_;
  const detail::ProductLayout& layout_;
  std::vector<double> sum_;
};

/// Pointwise product f*g. Scalars multiply every component of a vector partner;
/// two vectors multiply component-wise.
inline Field dealiased_product(const Field& f, const Field& g, Dealiasing rule = Dealiasing::padding) {
  if (!(f.grid() == g.grid())) {
    throw ShapeError("dealiased_product: fields live on different grids (" + describe(f.grid()) +
                     " vs " + describe(g.grid()) + ")");
  }
  const Grid& grid = f.grid();
  const int comps = std::max(f.components(), g.components());
  if (f.components() != g.components() && f.components() != 1 && g.components() != 1) {
    throw ShapeError("dealiased_product: incompatible component counts");
  }
  ProductAccumulator probe(grid, rule);
  Field out(grid, comps, Representation::spectral);
  std::vector<double> fixed;
  if (f.components() == 1) fixed = probe.lift(f);
  std::vector<double> fixed_g;
  if (g.components() == 1) fixed_g = probe.lift(g);
  for (int c = 0; c < comps; ++c) {
    ProductAccumulator acc(grid, rule);
    const auto a = f.components() == 1 ? fixed : acc.lift(f.component(c));
    const auto b = g.components() == 1 ? fixed_g : acc.lift(g.component(c));
    acc.add(a, b);
    out.set_component(c, acc.finish());
  }
  return out;
}

/// (a . grad) w for a vector field a and a scalar or vector field w.
inline Field advect(const Field& a, const Field& w, Dealiasing rule = Dealiasing::padding) {
  const Grid& g = a.grid();
  if (a.components() != g.dim()) throw ShapeError("advect: transport field must be a vector");
  if (!(w.grid() == g)) throw ShapeError("advect: fields live on different grids");
  ProductAccumulator probe(g, rule);
  std::vector<std::vector<double>> lifted_a;
  lifted_a.reserve(g.dim());
  for (int i = 0; i < g.dim(); ++i) lifted_a.push_back(probe.lift(a.component(i)));
  Field out(g, w.components(), Representation::spectral);
  for (int m = 0; m < w.components(); ++m) {
    const Field wm = w.component(m);
    ProductAccumulator acc(g, rule);
    for (int i = 0; i < g.dim(); ++i) acc.add(lifted_a[i], acc.lift(partial(wm, i)));
    out.set_component(m, acc.finish());
  }
  return out;
}

}  // namespace lplab
