#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lplab/littlewood_paley.hpp"
#include "lplab/parallel.hpp"
#include "lplab/projection.hpp"

namespace lplab {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double q = infinity;
};

inline void validate(const BesovSpec& spec) {
  if (!(spec.p >= 1.0) || !(spec.q >= 1.0)) throw DomainError("Besov exponents must satisfy p, q >= 1");
  if (!std::isfinite(spec.s)) throw DomainError("Besov regularity index must be finite");
}

/// 2^{js} ||Delta_j f||_p for j = -1 .. j_max (entry b holds j = b - 1).
inline std::vector<double> besov_sequence(const Field& f, const BesovSpec& spec) {
  validate(spec);
  auto seq = block_lp_norms(f, spec.p);
  for (std::size_t b = 0; b < seq.size(); ++b) seq[b] *= std::pow(2.0, (static_cast<int>(b) - 1) * spec.s);
  return seq;
}

/// ||f||_{B^s_{p,q}}: sup over blocks for q = infinity, l^q sum otherwise.
inline double besov_norm(const Field& f, const BesovSpec& spec) {
  const auto seq = besov_sequence(f, spec);
  if (std::isinf(spec.q)) {
    double m = 0.0;
    for (double v : seq) m = std::max(m, v);
    return m;
  }
  double acc = 0.0;
  for (double v : seq) acc += std::pow(v, spec.q);
  return std::pow(acc, 1.0 / spec.q);
}

/// curl u: a scalar in two dimensions, a vector in three.
inline Field curl(const Field& u) {
  const Grid& g = u.grid();
  if (u.components() != g.dim()) throw ShapeError("curl: expected a vector field");
  const Field us = to_spectral(u);
  if (g.dim() == 2) return partial(us.component(1), 0) - partial(us.component(0), 1);
  Field out = Field::vector(g);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    out.set_component(a, partial(us.component(c), b) - partial(us.component(b), c));
  }
  return out;
}

/// Mean-free, divergence-free velocity with curl u = w.
inline Field biot_savart(const Field& w) {
  const Grid& g = w.grid();
  const int expected = g.dim() == 2 ? 1 : 3;
  if (w.components() != expected) throw ShapeError("biot_savart: wrong number of vorticity components");
  const Field ws = to_spectral(w);
  const auto& lat = lattice(g);
  double scale = max_coeff(ws);
  for (int c = 0; c < ws.components(); ++c) {
    if (std::abs(ws.coeffs(c)[0]) > 1e-12 * std::max(scale, 1e-300)) {
      throw PreconditionError("biot_savart: vorticity has a nonzero mean");
    }
  }
  if (g.dim() == 3 && divergence_norm(ws) > 1e-10 * std::max(gradient_l2_norm(ws), 1e-300)) {
    throw PreconditionError("biot_savart: vorticity is not divergence free");
  }
  const cplx I{0.0, 1.0};
  Field out = Field::vector(g);
  out.set_solenoidal(true);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lat.k2[i] == 0 || lat.nyquist[i]) continue;
    const auto& k = lat.k[i];
    const double inv = 1.0 / static_cast<double>(lat.k2[i]);
    if (g.dim() == 2) {
      const cplx om = ws.coeffs(0)[i];
      out.coeffs(0)[i] = I * static_cast<double>(k[1]) * om * inv;
      out.coeffs(1)[i] = -I * static_cast<double>(k[0]) * om * inv;
    } else {
      const cplx w0 = ws.coeffs(0)[i], w1 = ws.coeffs(1)[i], w2 = ws.coeffs(2)[i];
      out.coeffs(0)[i] = I * (static_cast<double>(k[1]) * w2 - static_cast<double>(k[2]) * w1) * inv;
      out.coeffs(1)[i] = I * (static_cast<double>(k[2]) * w0 - static_cast<double>(k[0]) * w2) * inv;
      out.coeffs(2)[i] = I * (static_cast<double>(k[0]) * w1 - static_cast<double>(k[1]) * w0) * inv;
    }
  }
  return out;
}

/// ||u||_{B^1_{inf,inf}} / (||u||_2 + ||curl u||_{B^0_{inf,inf}}); zero for u = 0.
inline double bkm_ratio(const Field& field) {
  if (field.components() != field.grid().dim()) throw ShapeError("bkm_ratio: expected a vector field");
  const Field u = to_spectral(field);
  const double grad = gradient_l2_norm(u);
  if (grad == 0.0 && l2_norm(u) == 0.0) return 0.0;
  if (divergence_norm(u) > 1e-10 * std::max(grad, 1e-300)) {
    throw PreconditionError("bkm_ratio: velocity is not divergence free");
  }
  const double lhs = besov_norm(u, {1.0, infinity, infinity});
  const double rhs = l2_norm(u) + besov_norm(curl(u), {0.0, infinity, infinity});
  return lhs / rhs;
}

/// Exponents (p, q, r) tied by 2/q + 3/p = 1 + r.
struct CriterionTriple {
  double p = 6.0;
  double q = 2.0;
  double r = 0.5;
};

enum class TripleMode { uniqueness, losing_derivative };

inline double inverse_or_zero(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

inline void validate(const CriterionTriple& t, TripleMode mode = TripleMode::uniqueness) {
  auto fail = [&](const std::string& why) {
    throw DomainError("invalid triple (p=" + std::to_string(t.p) + ", q=" + std::to_string(t.q) +
                      ", r=" + std::to_string(t.r) + "): " + why);
  };
  if (!(t.p >= 1.0) || !(t.q >= 1.0)) fail("p, q >= 1 required");
  const double residual = 2.0 * inverse_or_zero(t.q) + 3.0 * inverse_or_zero(t.p) - 1.0 - t.r;
  if (std::abs(residual) > 1e-12) fail("2/q+3/p=1+r violated");
  if (mode == TripleMode::uniqueness) {
    if (!(t.r > 0.0 && t.r <= 1.0)) fail("r must lie in (0,1]");
    if (!(t.p > 3.0 / (1.0 + t.r))) fail("p must exceed 3/(1+r)");
    if (std::isinf(t.p) && t.r == 1.0) fail("(p,r)=(inf,1) is excluded");
  } else if (!(t.r > -1.0 && t.r <= 0.0)) {
    fail("r must lie in (-1,0]");
  }
}

/// Derives q from (p, r) through 2/q + 3/p = 1 + r.
inline double q_from(double p, double r) {
  const double two_over_q = 1.0 + r - 3.0 * inverse_or_zero(p);
  if (!(two_over_q > 0.0)) throw DomainError("no admissible q for these p and r");
  return 2.0 / two_over_q;
}

struct SplitResult {
  Field u_low;
  Field u_high;
  int N = 0;
  double p_tilde = 0.0;
  double q_tilde = 0.0;
  double norm_value = 0.0;
};

/// floor((q/2) log2(e + norm)) + 1, with arguments within 1e-12 of an integer snapped to it.
inline int split_level(double q, double norm_value) {
  const double x = 0.5 * q * std::log2(std::numbers::e + norm_value);
  const double nearest = std::round(x);
  const double fl = std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x)) ? nearest : std::floor(x);
  return static_cast<int>(fl) + 1;
}

/// p~ = max(3,p)(1+d), d the first of 1/2, 1/4, ... with 3/p - 3/p~ - r < 0; p~ = inf for p = inf.
/// Returns {p~, q~} with 2/q~ + 3/p~ = 1.
inline std::pair<double, double> split_exponents(const CriterionTriple& t) {
  if (std::isinf(t.p)) return {infinity, 2.0};
  const double base = std::max(3.0, t.p);
  for (double d = 0.5; d > 1e-12; d *= 0.5) {
    const double pt = base * (1.0 + d);
    if (3.0 / t.p - 3.0 / pt - t.r < 0.0) return {pt, 2.0 / (1.0 - 3.0 / pt)};
  }
  throw DomainError("no admissible p~ for this triple");
}

/// u = S_N u + (u - S_N u). A negative norm_value recomputes ||u||_{B^r_{p,inf}}.
inline SplitResult split_low_high(const Field& u, const CriterionTriple& t, double norm_value = -1.0) {
  validate(t);
  if (norm_value < 0.0) norm_value = besov_norm(u, {t.r, t.p, infinity});
  SplitResult out{Field::scalar(u.grid()), Field::scalar(u.grid())};
  out.norm_value = norm_value;
  out.N = split_level(t.q, norm_value);
  if (out.N > u.grid().j_max()) {
    throw ResolutionError("split level N=" + std::to_string(out.N) + " exceeds j_max=" +
                          std::to_string(u.grid().j_max()) + " on " + describe(u.grid()));
  }
  std::tie(out.p_tilde, out.q_tilde) = split_exponents(t);
  const Field us = to_spectral(u);
  out.u_low = s_j(us, out.N);
  out.u_high = us - out.u_low;
  return out;
}

/// ||grad u_low||_inf / (2^{2(1-1/q)N} ||u||_{B^r_{p,inf}}).
inline double low_bound_ratio(const SplitResult& s, const CriterionTriple& t) {
  const double scale = std::pow(2.0, 2.0 * (1.0 - 1.0 / t.q) * s.N) * s.norm_value;
  return scale > 0.0 ? gradient_sup_norm(s.u_low) / scale : 0.0;
}

/// ||u_high||_{p~} / (2^{(3/p - 3/p~ - r)N} ||u||_{B^r_{p,inf}}).
inline double high_bound_ratio(const SplitResult& s, const CriterionTriple& t) {
  const double expo = 3.0 * inverse_or_zero(t.p) - 3.0 * inverse_or_zero(s.p_tilde) - t.r;
  const double scale = std::pow(2.0, expo * s.N) * s.norm_value;
  return scale > 0.0 ? lp_norm(s.u_high, s.p_tilde) / scale : 0.0;
}

/// ||w||_{2p~/(p~-2)} / (||w||_2^{1-3/p~} ||grad w||_2^{3/p~}); zero for w = 0.
inline double gn_ratio(const Field& w, double p_tilde) {
  if (!(p_tilde > 3.0)) throw DomainError("gn_ratio requires p~ > 3");
  const double l2 = l2_norm(w);
  if (l2 == 0.0) return 0.0;
  const double theta = 3.0 * inverse_or_zero(p_tilde);
  const double exponent = std::isinf(p_tilde) ? 2.0 : 2.0 * p_tilde / (p_tilde - 2.0);
  const double grad = gradient_l2_norm(w);
  return lp_norm(w, exponent) / (std::pow(l2, 1.0 - theta) * std::pow(grad, theta));
}

}  // namespace lplab
