#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lplab/errors.hpp"
#include "lplab/fft.hpp"
#include "lplab/grid.hpp"

namespace lplab {

using cplx = std::complex<double>;

enum class Representation { physical, spectral };

inline const char* to_string(Representation r) {
  return r == Representation::physical ? "physical" : "spectral";
}

/// Scalar or vector field on a periodic grid, held either as real samples or as
/// Fourier coefficients normalized so that f(x) = sum_k c(k) e^{ik.x}.
///
/// Vector fields carry `grid.dim()` components stored contiguously.
class Field {
 public:
  Field() = default;

  Field(const Grid& grid, int components, Representation rep)
      : grid_(grid), components_(components), rep_(rep) {
    if (components != 1 && components != grid.dim()) {
      throw ShapeError("field must have 1 or " + std::to_string(grid.dim()) +
                       " components, got " + std::to_string(components));
    }
    const std::size_t total = grid.size() * static_cast<std::size_t>(components);
    if (rep == Representation::physical) {
      real_.assign(total, 0.0);
    } else {
      spec_.assign(total, cplx{0.0, 0.0});
    }
  }

  static Field scalar(const Grid& g, Representation rep = Representation::spectral) {
    return Field(g, 1, rep);
  }
  static Field vector(const Grid& g, Representation rep = Representation::spectral) {
    return Field(g, g.dim(), rep);
  }

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  bool is_vector() const { return components_ > 1; }
  Representation representation() const { return rep_; }
  bool is_spectral() const { return rep_ == Representation::spectral; }
  std::size_t points() const { return grid_.size(); }

  /// Set by constructions that guarantee a divergence-free vector field.
  bool solenoidal() const { return solenoidal_; }
  void set_solenoidal(bool tag) { solenoidal_ = tag; }

  std::span<double> samples(int c = 0) {
    require(Representation::physical);
    return {real_.data() + offset(c), points()};
  }
  std::span<const double> samples(int c = 0) const {
    require(Representation::physical);
    return {real_.data() + offset(c), points()};
  }
  std::span<cplx> coeffs(int c = 0) {
    require(Representation::spectral);
    return {spec_.data() + offset(c), points()};
  }
  std::span<const cplx> coeffs(int c = 0) const {
    require(Representation::spectral);
    return {spec_.data() + offset(c), points()};
  }
  std::span<const double> all_samples() const {
    require(Representation::physical);
    return real_;
  }
  std::span<const cplx> all_coeffs() const {
    require(Representation::spectral);
    return spec_;
  }

  Field component(int c) const {
    Field out(grid_, 1, rep_);
    if (rep_ == Representation::physical) {
      std::ranges::copy(samples(c), out.real_.begin());
    } else {
      std::ranges::copy(coeffs(c), out.spec_.begin());
    }
    return out;
  }

  void set_component(int c, const Field& scalar) {
    if (scalar.components_ != 1 || !(scalar.grid_ == grid_) || scalar.rep_ != rep_) {
      throw ShapeError("set_component needs a scalar field on the same grid and representation");
    }
    if (rep_ == Representation::physical) {
      std::ranges::copy(scalar.real_, samples(c).begin());
    } else {
      std::ranges::copy(scalar.spec_, coeffs(c).begin());
    }
    solenoidal_ = false;
  }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);

 private:
  void require(Representation r) const {
    if (rep_ != r) {
      throw ShapeError(std::string("field is held in ") + lplab::to_string(rep_) +
                       " representation, " + lplab::to_string(r) + " requested");
    }
  }
  std::size_t offset(int c) const {
    if (c < 0 || c >= components_) throw ShapeError("component index out of range");
    return static_cast<std::size_t>(c) * points();
  }

  friend Field to_spectral(const Field& f);
  friend Field to_physical(const Field& f);

  Grid grid_;
  int components_ = 1;
  Representation rep_ = Representation::spectral;
  std::vector<double> real_;
  std::vector<cplx> spec_;
  bool solenoidal_ = false;
};

inline void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw ShapeError(std::string(what) + ": fields live on different grids (" + describe(a.grid()) +
                     " vs " + describe(b.grid()) + ")");
  }
  if (a.components() != b.components()) {
    throw ShapeError(std::string(what) + ": component counts differ");
  }
}

/// Forward transform; Parseval reads ||f||_2^2 = (2pi)^dim sum |c(k)|^2.
inline Field to_spectral(const Field& f) {
  if (f.is_spectral()) return f;
  Field out(f.grid(), f.components(), Representation::spectral);
  out.solenoidal_ = f.solenoidal_;
  const std::size_t np = f.points();
  const double norm = 1.0 / static_cast<double>(np);
  std::vector<cplx> buffer(np);
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.samples(c);
    std::ranges::transform(src, buffer.begin(), [](double v) { return cplx{v, 0.0}; });
    auto dst = out.coeffs(c);
    fft::forward(f.grid().dim(), f.grid().n(), buffer.data(), dst.data());
    for (auto& v : dst) v *= norm;
  }
  return out;
}

/// Inverse transform. Imaginary parts (zero for Hermitian data) are discarded.
inline Field to_physical(const Field& f) {
  if (!f.is_spectral()) return f;
  Field out(f.grid(), f.components(), Representation::physical);
  out.solenoidal_ = f.solenoidal_;
  std::vector<cplx> buffer(f.points());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.coeffs(c);
    fft::backward(f.grid().dim(), f.grid().n(), src.data(), buffer.data());
    std::ranges::transform(buffer, out.samples(c).begin(), [](const cplx& v) { return v.real(); });
  }
  return out;
}

inline Field& Field::operator+=(const Field& other) {
  require_same_shape(*this, other, "operator+=");
  if (rep_ == Representation::physical) {
    const Field o = to_physical(other);
    for (std::size_t i = 0; i < real_.size(); ++i) real_[i] += o.real_[i];
  } else {
    const Field o = to_spectral(other);
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] += o.spec_[i];
  }
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

inline Field& Field::operator-=(const Field& other) {
  require_same_shape(*this, other, "operator-=");
  if (rep_ == Representation::physical) {
    const Field o = to_physical(other);
    for (std::size_t i = 0; i < real_.size(); ++i) real_[i] -= o.real_[i];
  } else {
    const Field o = to_spectral(other);
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] -= o.spec_[i];
  }
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

inline Field& Field::operator*=(double a) {
  for (auto& v : real_) v *= a;
  for (auto& v : spec_) v *= a;
  return *this;
}

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(double s, Field a) { return a *= s; }
inline Field operator*(Field a, double s) { return a *= s; }

/// Samples a scalar function f(x, y, z) at the grid points (z = 0 in 2D).
template <class Fn>
Field sample_scalar(const Grid& g, Fn&& fn) {
  Field out(g, 1, Representation::physical);
  auto s = out.samples();
  const int n = g.n();
  std::size_t idx = 0;
  if (g.dim() == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s[idx++] = fn(g.coordinate(i), g.coordinate(j), 0.0);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          s[idx++] = fn(g.coordinate(i), g.coordinate(j), g.coordinate(k));
  }
  return out;
}

/// Samples a vector function returning std::array<double, 3>; trailing entries are ignored in 2D.
template <class Fn>
Field sample_vector(const Grid& g, Fn&& fn) {
  Field out(g, g.dim(), Representation::physical);
  const int n = g.n();
  std::size_t idx = 0;
  auto put = [&](const std::array<double, 3>& v) {
    for (int c = 0; c < g.dim(); ++c) out.samples(c)[idx] = v[c];
    ++idx;
  };
  if (g.dim() == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) put(fn(g.coordinate(i), g.coordinate(j), 0.0));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) put(fn(g.coordinate(i), g.coordinate(j), g.coordinate(k)));
  }
  return out;
}

/// Pointwise Euclidean magnitude |f(x)| of a physical field.
inline std::vector<double> magnitude(const Field& f) {
  const Field p = to_physical(f);
  std::vector<double> mag(p.points(), 0.0);
  if (p.components() == 1) {
    auto s = p.samples();
    std::ranges::transform(s, mag.begin(), [](double v) { return std::abs(v); });
    return mag;
  }
  for (int c = 0; c < p.components(); ++c) {
    auto s = p.samples(c);
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += s[i] * s[i];
  }
  for (auto& m : mag) m = std::sqrt(m);
  return mag;
}

/// L^p norm by rectangle-rule quadrature of |f|^p (exact for trigonometric
/// polynomials when p is an even integer below the grid's aliasing limit);
/// p = infinity returns the maximum over samples.
inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw DomainError("Lebesgue exponent must satisfy p >= 1");
  if (f.representation() == Representation::spectral) {
    const auto co = f.all_coeffs();
    if (std::all_of(co.begin(), co.end(), [](const cplx& c) { return c == cplx(0.0, 0.0); })) return 0.0;
  }
  const auto mag = magnitude(f);
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::ranges::max_element(mag);
  const double dv = f.grid().cell_volume();
  double acc = 0.0;
  if (p == 2.0) {
    for (double m : mag) acc += m * m;
    return std::sqrt(acc * dv);
  }
  for (double m : mag) acc += std::pow(m, p);
  return std::pow(acc * dv, 1.0 / p);
}

inline double sup_norm(const Field& f) { return lp_norm(f, std::numeric_limits<double>::infinity()); }

/// L^2 inner product via Parseval, summed over components.
inline double inner(const Field& a, const Field& b) {
  require_same_shape(a, b, "inner");
  const Field sa = to_spectral(a);
  const Field sb = to_spectral(b);
  const auto ca = sa.all_coeffs();
  const auto cb = sb.all_coeffs();
  double acc = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    acc += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
  }
  return acc * a.grid().volume();
}

inline double l2_norm(const Field& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

/// Multiplies every component coefficient-wise by a real function of the lattice index.
template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& m) {
  Field out = to_spectral(f);
  const std::size_t np = out.points();
  for (int c = 0; c < out.components(); ++c) {
    auto co = out.coeffs(c);
    for (std::size_t i = 0; i < np; ++i) co[i] *= m(i);
  }
  out.set_solenoidal(f.solenoidal());
  return out;
}

/// Coefficient-wise multiplication by (ik)^alpha. Entries on a Nyquist plane
/// with an odd derivative order along that axis are zeroed so real fields stay real.
inline Field derivative(const Field& f, const std::array<int, 3>& alpha) {
  Field out = to_spectral(f);
  const Grid& g = out.grid();
  const auto& lat = lattice(g);
  const int half = g.n() / 2;
  int order = 0;
  for (int a = 0; a < g.dim(); ++a) order += alpha[a];
  if (order == 0) return out;
  if (order == 1) {
    int axis = 0;
    while (alpha[axis] == 0) ++axis;
    for (int c = 0; c < out.components(); ++c) {
      auto co = out.coeffs(c);
      for (std::size_t i = 0; i < co.size(); ++i) {
        const int k = lat.k[i][axis];
        const double kd = static_cast<double>(k);
        co[i] = k == -half ? cplx{0.0, 0.0} : cplx{-co[i].imag() * kd, co[i].real() * kd};
      }
    }
    out.set_solenoidal(false);
    return out;
  }
  const cplx unit_power[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx phase = unit_power[order % 4];
  for (int c = 0; c < out.components(); ++c) {
    auto co = out.coeffs(c);
    for (std::size_t i = 0; i < co.size(); ++i) {
      double mag = 1.0;
      bool kill = false;
      for (int a = 0; a < g.dim(); ++a) {
        if (alpha[a] == 0) continue;
        const int k = lat.k[i][a];
        if (k == -half && (alpha[a] % 2) == 1) kill = true;
        mag *= std::pow(static_cast<double>(k), alpha[a]);
      }
      co[i] = kill ? cplx{0.0, 0.0} : co[i] * (phase * mag);
    }
  }
  out.set_solenoidal(false);
  return out;
}

inline std::array<int, 3> unit_index(int axis) {
  std::array<int, 3> alpha{0, 0, 0};
  alpha[axis] = 1;
  return alpha;
}

inline Field partial(const Field& f, int axis) { return derivative(f, unit_index(axis)); }

inline Field gradient(const Field& scalar) {
  if (scalar.components() != 1) throw ShapeError("gradient expects a scalar field");
  const Grid& g = scalar.grid();
  Field out = Field::vector(g);
  for (int a = 0; a < g.dim(); ++a) out.set_component(a, partial(scalar, a));
  return out;
}

inline Field divergence(const Field& v) {
  if (v.components() != v.grid().dim()) throw ShapeError("divergence expects a vector field");
  Field out = Field::scalar(v.grid());
  for (int a = 0; a < v.grid().dim(); ++a) out += partial(v.component(a), a);
  return out;
}

inline Field laplacian(const Field& f) {
  const auto& lat = lattice(f.grid());
  return apply_multiplier(f, [&](std::size_t i) { return -lat.k2[i]; });
}

/// ||grad f||_2 summed over components, evaluated spectrally.
inline double gradient_l2_norm(const Field& f) {
  const Field s = to_spectral(f);
  const auto& lat = lattice(f.grid());
  double acc = 0.0;
  for (int c = 0; c < s.components(); ++c) {
    auto co = s.coeffs(c);
    for (std::size_t i = 0; i < co.size(); ++i) {
      if (lat.nyquist[i]) continue;
      acc += lat.k2[i] * std::norm(co[i]);
    }
  }
  return std::sqrt(acc * f.grid().volume());
}

/// sup_x of the Frobenius norm of the Jacobian of a vector field (or |grad f| for scalars).
inline double gradient_sup_norm(const Field& f) {
  const Grid& g = f.grid();
  std::vector<double> acc(g.size(), 0.0);
  for (int c = 0; c < f.components(); ++c) {
    const Field fc = f.component(c);
    for (int a = 0; a < g.dim(); ++a) {
      const Field d = to_physical(partial(fc, a));
      auto s = d.samples();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i] * s[i];
    }
  }
  double m = 0.0;
  for (double v : acc) m = std::max(m, v);
  return std::sqrt(m);
}

/// Zeroes every coefficient with |k| > k_max, and the Nyquist planes.
inline Field band_limit(const Field& f, double k_max) {
  const auto& lat = lattice(f.grid());
  return apply_multiplier(f, [&](std::size_t i) {
    return (lat.nyquist[i] || lat.radius[i] > k_max) ? 0.0 : 1.0;
  });
}

/// Largest coefficient magnitude; handy for absolute spectral comparisons.
inline double max_coeff(const Field& f) {
  const Field s = to_spectral(f);
  double m = 0.0;
  for (const auto& c : s.all_coeffs()) m = std::max(m, std::abs(c));
  return m;
}

inline Field zeros_like(const Field& f) { return Field(f.grid(), f.components(), f.representation()); }

}  // namespace lplab
