#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lplab/besov.hpp"
#include "lplab/config.hpp"
#include "lplab/format.hpp"
#include "lplab/navier_stokes.hpp"
#include "lplab/parallel.hpp"

namespace lplab {

/// Cumulative trapezoid integral of f over t, starting from 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size()) throw ShapeError("cumulative_trapezoid: size mismatch");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

inline void require_aligned(const Trajectory& u, const Trajectory& v) {
  if (u.snapshots.size() != v.snapshots.size()) {
    throw ShapeError("trajectories are not aligned: " + std::to_string(u.snapshots.size()) + " vs " +
                     std::to_string(v.snapshots.size()) + " snapshots");
  }
  for (std::size_t i = 0; i < u.snapshots.size(); ++i) {
    const double a = u.snapshots[i].time;
    const double b = v.snapshots[i].time;
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw ShapeError("trajectories are not aligned at snapshot " + std::to_string(i));
    }
    if (!(u.snapshots[i].u.grid() == v.snapshots[i].u.grid())) {
      throw ShapeError("trajectories live on different grids");
    }
  }
}

/// Per-snapshot, per-block values; rows[i][j + 1] holds block j = -1 .. j_max.
struct BlockTable {
  std::vector<double> times;
  int j_max = -1;
  std::vector<std::vector<double>> rows;

  double at(std::size_t i, int j) const { return rows[i][static_cast<std::size_t>(j + 1)]; }
  std::size_t snapshots() const { return rows.size(); }
};

/// ||Delta_j f||_p for j = -1 .. j_max.
inline std::vector<double> block_norms(const Field& f, double p) { return block_lp_norms(f, p); }

namespace detail {

template <class RowFn>
BlockTable tabulate(const Trajectory& t, RowFn&& row) {
  BlockTable out;
  out.times = t.times();
  out.j_max = t.snapshots.empty() ? -1 : t.snapshots.front().u.grid().j_max();
  out.rows.resize(t.snapshots.size());
  parallel_for(t.snapshots.size(), [&](std::size_t i) { out.rows[i] = row(i); });
  return out;
}

inline double sup_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace detail

/// ||u(t_i)||_{B^s_{p,q}} at every snapshot.
inline std::vector<double> besov_series(const Trajectory& t, const BesovSpec& spec) {
  validate(spec);
  std::vector<double> out(t.snapshots.size());
  parallel_for(out.size(), [&](std::size_t i) {
    const auto norms = block_norms(t.snapshots[i].u, spec.p);
    std::vector<double> seq(norms.size());
    for (std::size_t b = 0; b < norms.size(); ++b) seq[b] = std::pow(2.0, (static_cast<int>(b) - 1) * spec.s) * norms[b];
    if (std::isinf(spec.q)) {
      out[i] = detail::sup_of(seq);
    } else {
      double acc = 0.0;
      for (double x : seq) acc += std::pow(x, spec.q);
      out[i] = std::pow(acc, 1.0 / spec.q);
    }
  });
  return out;
}

/// I(t_i) = int_0^{t_i} (e + ||u||_{B^r_{p,inf}})^q dt' from per-snapshot norms.
inline std::vector<double> criterion_integral(const std::vector<double>& times, const std::vector<double>& norms,
                                              double q) {
  if (times.empty()) throw PreconditionError("criterion integral of an empty trajectory");
  std::vector<double> f(norms.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::numbers::e + norms[i], q);
  return cumulative_trapezoid(times, f);
}

/// Snapshots must be at most 10 steps apart for the trapezoid rule to be meaningful.
inline void require_dense(const Trajectory& t) {
  const double limit = 10.0 * std::abs(t.config.dt) * (1.0 + 1e-9);
  for (std::size_t i = 1; i < t.snapshots.size(); ++i) {
    if (std::abs(t.snapshots[i].time - t.snapshots[i - 1].time) > limit) {
      throw PreconditionError("snapshots are more than 10 steps apart; rerun with cadence <= 10");
    }
  }
}

inline std::vector<double> criterion_integral(const Trajectory& t, const CriterionTriple& triple) {
  validate(triple);
  if (t.snapshots.empty()) throw PreconditionError("criterion integral of an empty trajectory");
  require_dense(t);
  return criterion_integral(t.times(), besov_series(t, {triple.r, triple.p, infinity}), triple.q);
}

/// ||Delta_j (u - v)(t_i)||_2.
inline BlockTable block_series(const Trajectory& u, const Trajectory& v) {
  require_aligned(u, v);
  return detail::tabulate(u, [&](std::size_t i) { return block_norms(u.snapshots[i].u - v.snapshots[i].u, 2.0); });
}

/// ||Delta_j u(t_i)||_inf.
inline BlockTable block_sup_series(const Trajectory& u) {
  return detail::tabulate(u, [&](std::size_t i) { return block_norms(u.snapshots[i].u, infinity); });
}

struct WeightedSup {
  double value = 0.0;
  int j = -1;
};

/// sup_j 2^{-js} row[j]; ties go to the smallest j.
inline WeightedSup weighted_sup(const std::vector<double>& row, double s) {
  WeightedSup out;
  for (std::size_t b = 0; b < row.size(); ++b) {
    const int j = static_cast<int>(b) - 1;
    const double x = std::pow(2.0, -j * s) * row[b];
    if (x > out.value) out = {x, j};
  }
  return out;
}

/// W(t_i) = sup_{j >= -1} 2^{-js} ||w_j(t_i)||_2 for every snapshot.
inline std::vector<WeightedSup> diff_norm_W(const BlockTable& w_blocks, double s) {
  std::vector<WeightedSup> out;
  out.reserve(w_blocks.snapshots());
  for (const auto& row : w_blocks.rows) out.push_back(weighted_sup(row, s));
  return out;
}

inline WeightedSup diff_norm_W(const Trajectory& u, const Trajectory& v, double s, std::size_t i) {
  require_aligned(u, v);
  if (i >= u.snapshots.size()) throw RangeError("snapshot index out of range");
  return weighted_sup(block_norms(u.snapshots[i].u - v.snapshots[i].u, 2.0), s);
}

/// ||f||_{B^1_{inf,inf}} at every snapshot from a table of block sup norms.
inline std::vector<double> b1_series(const BlockTable& sup_blocks) {
  std::vector<double> out;
  out.reserve(sup_blocks.snapshots());
  for (const auto& row : sup_blocks.rows) {
    double m = 0.0;
    for (std::size_t b = 0; b < row.size(); ++b) m = std::max(m, std::ldexp(row[b], static_cast<int>(b) - 1));
    out.push_back(m);
  }
  return out;
}

/// eps_j(t) = int_0^t sum_{j' <= j+4} 2^{j'} (||Delta_j' u||_inf + ||Delta_j' v||_inf) dt'.
inline BlockTable epsilon_weights(const BlockTable& u_sup, const BlockTable& v_sup) {
  if (u_sup.snapshots() != v_sup.snapshots() || u_sup.j_max != v_sup.j_max) {
    throw ShapeError("epsilon_weights: block tables are not aligned");
  }
  const std::size_t nb = static_cast<std::size_t>(u_sup.j_max + 2);
  const std::size_t ns = u_sup.snapshots();
  // integrand[i][b]: prefix sums, so it is nondecreasing in j by construction.
  std::vector<std::vector<double>> integrand(ns, std::vector<double>(nb, 0.0));
  for (std::size_t i = 0; i < ns; ++i) {
    std::vector<double> terms(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      terms[b] = std::ldexp(u_sup.rows[i][b] + v_sup.rows[i][b], static_cast<int>(b) - 1);
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t upto = std::min(nb, b + 5);  // j' <= j + 4
      while (used < upto) acc += terms[used++];
      integrand[i][b] = acc;
    }
  }
  BlockTable out;
  out.times = u_sup.times;
  out.j_max = u_sup.j_max;
  out.rows.assign(ns, std::vector<double>(nb, 0.0));
  for (std::size_t i = 1; i < ns; ++i) {
    const double h = out.times[i] - out.times[i - 1];
    for (std::size_t b = 0; b < nb; ++b) {
      out.rows[i][b] = out.rows[i - 1][b] + 0.5 * h * (integrand[i][b] + integrand[i - 1][b]);
    }
  }
  return out;
}

inline BlockTable epsilon_weights(const Trajectory& u, const Trajectory& v) {
  require_aligned(u, v);
  return epsilon_weights(block_sup_series(u), block_sup_series(v));
}

/// Largest violation of eps_{j'} - eps_j <= (j'-j) L(t) over snapshots and j < j',
/// with L = ||u||_{L^1 B^1_{inf,inf}} + ||v||_{L^1 B^1_{inf,inf}}; <= 0 when the bound holds.
inline double epsilon_growth_excess(const BlockTable& eps, const std::vector<double>& l1_b1) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eps.snapshots(); ++i) {
    const auto& row = eps.rows[i];
    for (std::size_t a = 0; a < row.size(); ++a) {
      for (std::size_t b = a + 1; b < row.size(); ++b) {
        worst = std::max(worst, row[b] - row[a] - static_cast<double>(b - a) * l1_b1[i]);
      }
    }
  }
  return worst;
}

/// True when eps_j(t) is nondecreasing in t and in j (exact comparison).
inline bool epsilon_monotone(const BlockTable& eps) {
  for (std::size_t i = 0; i < eps.snapshots(); ++i) {
    for (std::size_t b = 0; b < eps.rows[i].size(); ++b) {
      if (b > 0 && eps.rows[i][b] < eps.rows[i][b - 1]) return false;
      if (i > 0 && eps.rows[i][b] < eps.rows[i - 1][b]) return false;
    }
  }
  return true;
}

/// Loss index s and weight rate lambda of the losing-derivative estimate.
struct LosingParams {
  double s = 0.5;
  double lambda = 1.0;
};

inline void validate(const LosingParams& p) {
  if (!(p.s > 0.0 && p.s < 1.0)) throw DomainError("loss index s must lie in (0,1)");
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw DomainError("weight rate lambda must be positive");
}

/// Admissible s for two solutions in B^{r1} and B^{r2}: -r1 < s < min(1+r1, 1+r2).
struct SWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty() const { return lo < hi; }
  bool contains(double s) const { return lo < s && s < hi; }
};

inline SWindow s_window(double r1, double r2) { return {-r1, std::min(1.0 + r1, 1.0 + r2)}; }

/// W_j^lambda(t) = 2^{-js} e^{-lambda eps_j(t)} ||w_j(t)||_2.
inline BlockTable losing_weight(const BlockTable& w_blocks, const BlockTable& eps, double lambda, double s) {
  if (w_blocks.snapshots() != eps.snapshots() || w_blocks.j_max != eps.j_max) {
    throw ShapeError("losing_weight: block tables are not aligned");
  }
  if (!(lambda >= 0.0)) throw DomainError("weight rate lambda must be >= 0");
  BlockTable out = w_blocks;
  for (std::size_t i = 0; i < out.snapshots(); ++i) {
    for (std::size_t b = 0; b < out.rows[i].size(); ++b) {
      const int j = static_cast<int>(b) - 1;
      out.rows[i][b] = std::pow(2.0, -j * s) * std::exp(-lambda * eps.rows[i][b]) * w_blocks.rows[i][b];
    }
  }
  return out;
}

/// sup over j and snapshots 0..last of a block table.
inline double table_sup(const BlockTable& t, std::size_t last) {
  double m = 0.0;
  for (std::size_t i = 0; i <= last && i < t.snapshots(); ++i) m = std::max(m, detail::sup_of(t.rows[i]));
  return m;
}

struct SmallnessWindow {
  double t_star = 0.0;
  std::size_t index = 0;
};

/// Largest snapshot time with lambda L(t) < (1-s) log 2, L = ||u||_{L^1 B^1} + ||v||_{L^1 B^1}.
/// L identically zero gives the final time.
inline SmallnessWindow smallness_window(const std::vector<double>& times, const std::vector<double>& l1_b1,
                                        double s, double lambda) {
  if (times.empty()) return {};
  const double bound = (1.0 - s) * std::numbers::ln2;
  SmallnessWindow out;
  bool found = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (lambda * l1_b1[i] < bound) {
      out = {times[i], i};
      found = true;
    }
  }
  if (!found) return {};
  return out;
}

inline std::vector<double> l1_b1_series(const BlockTable& u_sup, const BlockTable& v_sup) {
  const auto bu = b1_series(u_sup);
  const auto bv = b1_series(v_sup);
  std::vector<double> sum(bu.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = bu[i] + bv[i];
  return cumulative_trapezoid(u_sup.times, sum);
}

inline SmallnessWindow smallness_window(const Trajectory& u, const Trajectory& v, double s, double lambda) {
  validate(LosingParams{s, lambda});
  require_aligned(u, v);
  const auto us = block_sup_series(u);
  return smallness_window(us.times, l1_b1_series(us, block_sup_series(v)), s, lambda);
}

/// int_{T^d} (u . grad v) . w dx with a dealiased product.
inline double trilinear(const Field& u, const Field& v, const Field& w, Dealiasing rule = Dealiasing::padding) {
  return inner(advect(u, v, rule), w);
}

/// Terms of the localized energy balance for w_j = Delta_j(u - v) at one interior snapshot:
///   1/2 d/dt ||w_j||^2 + nu ||grad w_j||^2 = -<Delta_j(w.grad u), w_j> - <Delta_j(v.grad w) - v.grad w_j, w_j>.
struct BlockAudit {
  int j = -1;
  double time = 0.0;
  double energy_rate = 0.0;      // centered difference of 1/2 ||w_j||_2^2
  double gradient_sq = 0.0;      // ||grad w_j||_2^2
  double dissipation = 0.0;      // nu ||grad w_j||_2^2
  double stretching = 0.0;       // -<Delta_j(w.grad u), w_j>
  double commutator = 0.0;       // -<Delta_j(v.grad w) - v.grad w_j, w_j>
  double transport = 0.0;        // <v.grad w_j, w_j>
  double residual = 0.0;         // |rate + dissipation - stretching - commutator| / largest term
  double energy_sq = 0.0;        // ||w_j||_2^2
  bool lower_bound_ok = true;    // ||grad w_j||^2 >= (3/4)^2 4^j ||w_j||^2, asserted for j >= 0
};

inline BlockAudit block_energy_audit(const Trajectory& u, const Trajectory& v, int j, std::size_t i) {
  require_aligned(u, v);
  if (j < -1) throw RangeError("block index must be >= -1");
  if (i == 0 || i + 1 >= u.snapshots.size()) throw RangeError("no centered difference at a boundary snapshot");
  const auto rule = u.config.dealias;
  const double nu = u.config.nu;
  auto wj_at = [&](std::size_t k) { return delta_j(to_spectral(u.snapshots[k].u - v.snapshots[k].u), j); };
  const Field& ui = u.snapshots[i].u;
  const Field& vi = v.snapshots[i].u;
  const Field w = to_spectral(ui - vi);
  const Field wj = delta_j(w, j);
  BlockAudit a;
  a.j = j;
  a.time = u.snapshots[i].time;
  const double ep = l2_norm(wj_at(i + 1));
  const double em = l2_norm(wj_at(i - 1));
  a.energy_rate = 0.5 * (ep * ep - em * em) / (u.snapshots[i + 1].time - u.snapshots[i - 1].time);
  const double gn = gradient_l2_norm(wj);
  a.gradient_sq = gn * gn;
  a.dissipation = nu * a.gradient_sq;
  const double en = l2_norm(wj);
  a.energy_sq = en * en;
  a.stretching = -inner(delta_j(advect(w, ui, rule), j), wj);
  const Field vgw_j = advect(vi, wj, rule);
  a.commutator = -inner(delta_j(advect(vi, w, rule), j) - vgw_j, wj);
  a.transport = inner(vgw_j, wj);
  const double scale = std::max({std::abs(a.energy_rate), a.dissipation, std::abs(a.stretching), std::abs(a.commutator)});
  const double gap = a.energy_rate + a.dissipation - a.stretching - a.commutator;
  a.residual = scale > 0.0 ? std::abs(gap) / scale : 0.0;
  if (j >= 0) a.lower_bound_ok = a.gradient_sq >= (1.0 - 1e-12) * 0.5625 * std::ldexp(1.0, 2 * j) * a.energy_sq;
  return a;
}

/// Residual of <u,v>(t) + 2 nu int <grad u, grad v> = <u0,v0> + int <w.grad u, w> over every snapshot,
/// relative to ||u0||_2^2. Time integrals by trapezoid.
inline double integral_identity_check(const Trajectory& u, const Trajectory& v) {
  require_aligned(u, v);
  if (u.snapshots.empty()) return 0.0;
  const std::size_t ns = u.snapshots.size();
  std::vector<double> pair(ns), grad(ns), tri(ns);
  const auto rule = u.config.dealias;
  parallel_for(ns, [&](std::size_t i) {
    const Field& a = u.snapshots[i].u;
    const Field& b = v.snapshots[i].u;
    pair[i] = inner(a, b);
    grad[i] = -inner(a, laplacian(b));
    const Field w = a - b;
    tri[i] = trilinear(w, a, w, rule);
  });
  const auto times = u.times();
  const auto grad_int = cumulative_trapezoid(times, grad);
  const auto tri_int = cumulative_trapezoid(times, tri);
  const double u0 = l2_norm(u.snapshots.front().u);
  const double scale = u0 > 0.0 ? u0 * u0 : 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const double lhs = pair[i] + 2.0 * u.config.nu * grad_int[i];
    const double rhs = pair[0] + tri_int[i];
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/// Energy-inequality envelope for w = u - v against the criterion integral of u:
///   LHS(t) = ||w(t)||_2^2 + nu int_0^t ||grad w||_2^2,  C(t) = log(LHS(t) / ||w0||_2^2) / I(t).
struct GronwallFit {
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> integral;
  std::vector<double> constant;  // NaN at t = 0
  std::vector<double> w_ratio;   // ||w(t)||_2 / ||w0||_2
  double w0_sq = 0.0;
  double sup_constant = 0.0;
  bool degenerate = false;
};

inline GronwallFit gronwall_fit(const Trajectory& u, const Trajectory& v, const CriterionTriple& triple) {
  validate(triple);
  require_aligned(u, v);
  GronwallFit fit;
  fit.times = u.times();
  fit.integral = criterion_integral(u, triple);
  const std::size_t ns = fit.times.size();
  std::vector<double> wsq(ns), gsq(ns);
  parallel_for(ns, [&](std::size_t i) {
    const Field w = u.snapshots[i].u - v.snapshots[i].u;
    const double a = l2_norm(w);
    const double g = gradient_l2_norm(w);
    wsq[i] = a * a;
    gsq[i] = g * g;
  });
  const auto diss = cumulative_trapezoid(fit.times, gsq);
  fit.w0_sq = wsq[0];
  fit.degenerate = fit.w0_sq == 0.0;
  fit.lhs.resize(ns);
  fit.constant.assign(ns, std::numeric_limits<double>::quiet_NaN());
  fit.w_ratio.assign(ns, 0.0);
  fit.sup_constant = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns; ++i) {
    fit.lhs[i] = wsq[i] + u.config.nu * diss[i];
    if (fit.degenerate) continue;
    fit.w_ratio[i] = std::sqrt(wsq[i] / fit.w0_sq);
    if (i > 0 && fit.integral[i] > 0.0) {
      fit.constant[i] = std::log(fit.lhs[i] / fit.w0_sq) / fit.integral[i];
      fit.sup_constant = std::max(fit.sup_constant, fit.constant[i]);
    }
  }
  if (fit.degenerate) fit.sup_constant = 0.0;
  return fit;
}

/// LHS(t) <= ||w0||^2 exp(C I(t)) at every snapshot (relative slack 1e-12). Degenerate fits hold trivially.
inline bool envelope_holds(const GronwallFit& fit, double C) {
  if (fit.degenerate) return true;
  for (std::size_t i = 0; i < fit.lhs.size(); ++i) {
    if (fit.lhs[i] > fit.w0_sq * std::exp(C * fit.integral[i]) * (1.0 + 1e-12)) return false;
  }
  return true;
}

/// max / min of positive finite values; infinity when any value is nonpositive or not finite.
inline double spread(const std::vector<double>& values) {
  if (values.empty()) return infinity;
  double lo = infinity, hi = 0.0;
  for (double x : values) {
    if (!(x > 0.0) || !std::isfinite(x)) return infinity;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

struct GronwallRun {
  int n = 0;
  double delta = 0.0;
  GronwallFit fit;
};

struct GronwallSweep {
  std::vector<GronwallRun> runs;
  double constant_spread = infinity;
  /// Largest relative deviation of ||w(t)||/||w0|| from the smallest-delta run at the same resolution.
  double ratio_deviation = infinity;
  bool pass = false;
};

/// Twin runs of `base` at every resolution and perturbation size; the base trajectory is shared across delta.
/// Passes when every sup_t C is finite and positive, the spread over all runs is <= 2 and the ratio curves
/// agree across delta within 10%.
inline GronwallSweep gronwall_check(SolverConfig base, const CriterionTriple& triple, const std::vector<double>& deltas,
                                    const std::vector<int>& resolutions, std::uint64_t seed) {
  validate(triple);
  GronwallSweep out;
  std::vector<double> constants;
  out.ratio_deviation = 0.0;
  for (int n : resolutions) {
    base.n = n;
    validate(base);
    const Field u0 = initial_condition(base);
    const Trajectory tu = run_from(base, u0);
    std::vector<GronwallRun> level;
    for (double d : deltas) {
      const Trajectory tv = run_from(base, u0 + twin_perturbation(base, u0, d, seed));
      level.push_back({n, d, gronwall_fit(tu, tv, triple)});
      constants.push_back(level.back().fit.sup_constant);
    }
    if (!level.empty()) {
      const auto ref = std::min_element(level.begin(), level.end(),
                                        [](const auto& a, const auto& b) { return a.delta < b.delta; });
      for (const auto& r : level) {
        for (std::size_t i = 0; i < r.fit.w_ratio.size(); ++i) {
          const double x = ref->fit.w_ratio[i];
          out.ratio_deviation = std::max(out.ratio_deviation, std::abs(r.fit.w_ratio[i] - x) / x);
        }
      }
    }
    for (auto& r : level) out.runs.push_back(std::move(r));
  }
  out.constant_spread = spread(constants);
  out.pass = out.constant_spread <= 2.0 && out.ratio_deviation <= 0.1;
  return out;
}

/// One row per run and snapshot: n, delta, time, LHS, I(t), C(t), ||w||/||w0||.
inline void write_csv(std::ostream& os, const GronwallSweep& sweep) {
  os << "n,delta,time,lhs,criterion_integral,C,w_ratio\n";
  for (const auto& r : sweep.runs) {
    const auto& f = r.fit;
    for (std::size_t i = 0; i < f.times.size(); ++i) {
      os << r.n << "," << format_double(r.delta) << "," << format_double(f.times[i]) << "," << format_double(f.lhs[i])
         << "," << format_double(f.integral[i]) << "," << format_double(f.constant[i]) << ","
         << format_double(f.w_ratio[i]) << "\n";
    }
  }
}

/// K = sup_{0 < i <= last} log(W(t_i)^2 / W(0)^2) / J(t_i) over snapshots with J > 0; 0 if none qualify.
inline double fit_growth_exponent(const std::vector<double>& W, const std::vector<double>& J, std::size_t last) {
  double K = 0.0;
  if (W.empty() || !(W.front() > 0.0)) return K;
  for (std::size_t i = 1; i <= last && i < W.size(); ++i) {
    if (J[i] > 0.0 && W[i] > 0.0) K = std::max(K, 2.0 * std::log(W[i] / W.front()) / J[i]);
  }
  return K;
}

/// Time integrals of the low/high split of a stored trajectory against the criterion integral.
struct SplitIntegrals {
  double criterion = 0.0;  // int (e + ||u||_{B^r_{p,inf}})^q
  double low = 0.0;        // int ||grad u^l||_inf
  double high = 0.0;       // int ||u^h||_{p~}^{q~}
  double low_constant = 0.0;
  double high_constant = 0.0;
  std::vector<int> levels;
};

inline SplitIntegrals split_integrals(const Trajectory& t, const CriterionTriple& triple) {
  validate(triple);
  if (t.snapshots.empty()) throw PreconditionError("split integrals of an empty trajectory");
  const std::size_t ns = t.snapshots.size();
  std::vector<double> norms(ns), low(ns), high(ns);
  SplitIntegrals out;
  out.levels.resize(ns);
  parallel_for(ns, [&](std::size_t i) {
    const Field& u = t.snapshots[i].u;
    const auto bn = block_norms(u, triple.p);
    double m = 0.0;
    for (std::size_t b = 0; b < bn.size(); ++b) m = std::max(m, std::pow(2.0, (static_cast<int>(b) - 1) * triple.r) * bn[b]);
    norms[i] = m;
    const SplitResult s = split_low_high(u, triple, m);
    out.levels[i] = s.N;
    low[i] = gradient_sup_norm(s.u_low);
    high[i] = std::pow(lp_norm(s.u_high, s.p_tilde), s.q_tilde);
  });
  const auto times = t.times();
  out.criterion = criterion_integral(times, norms, triple.q).back();
  out.low = cumulative_trapezoid(times, low).back();
  out.high = cumulative_trapezoid(times, high).back();
  if (out.criterion > 0.0) {
    out.low_constant = out.low / out.criterion;
    out.high_constant = out.high / out.criterion;
  }
  return out;
}

struct CriterionReport {
  CriterionTriple triple;
  LosingParams losing;
  std::vector<double> times;
  std::vector<double> norm_u;  // ||u||_{B^r_{p,inf}}
  std::vector<double> norm_v;
  std::vector<double> integral;
  BlockTable w_blocks;
  std::vector<WeightedSup> W;
  BlockTable epsilon;
  BlockTable weights;
  std::vector<double> l1_b1;
  SmallnessWindow window;
  double growth_exponent = 0.0;
  double epsilon_excess = 0.0;
  bool epsilon_monotone = true;
  GronwallFit gronwall;
};

/// All diagnostics for a pair of aligned trajectories. Parameters are validated before any block work.
inline CriterionReport build_report(const Trajectory& u, const Trajectory& v, const CriterionTriple& triple,
                                    const LosingParams& losing) {
  validate(triple);
  validate(losing);
  require_aligned(u, v);
  if (u.snapshots.empty()) throw PreconditionError("report on empty trajectories");
  CriterionReport r;
  r.triple = triple;
  r.losing = losing;
  r.times = u.times();
  const BesovSpec spec{triple.r, triple.p, infinity};
  r.norm_u = besov_series(u, spec);
  r.norm_v = besov_series(v, spec);
  r.integral = criterion_integral(r.times, r.norm_u, triple.q);
  r.w_blocks = block_series(u, v);
  r.W = diff_norm_W(r.w_blocks, losing.s);
  const BlockTable us = block_sup_series(u);
  const BlockTable vs = block_sup_series(v);
  r.epsilon = epsilon_weights(us, vs);
  r.weights = losing_weight(r.w_blocks, r.epsilon, losing.lambda, losing.s);
  r.l1_b1 = l1_b1_series(us, vs);
  r.window = smallness_window(r.times, r.l1_b1, losing.s, losing.lambda);
  r.epsilon_excess = epsilon_growth_excess(r.epsilon, r.l1_b1);
  r.epsilon_monotone = epsilon_monotone(r.epsilon);
  std::vector<double> w_values, both(r.times.size());
  for (const auto& w : r.W) w_values.push_back(w.value);
  for (std::size_t i = 0; i < both.size(); ++i) {
    both[i] = std::pow(r.norm_u[i], triple.q) + std::pow(r.norm_v[i], triple.q);
  }
  r.growth_exponent = fit_growth_exponent(w_values, cumulative_trapezoid(r.times, both), r.window.index);
  r.gronwall = gronwall_fit(u, v, triple);
  return r;
}

/// CSV with a `time` column followed by one column per block j = -1 .. j_max.
inline void write_csv(std::ostream& os, const BlockTable& t) {
  os << "time";
  for (int j = -1; j <= t.j_max; ++j) os << ",j" << j;
  os << "\n";
  for (std::size_t i = 0; i < t.snapshots(); ++i) {
    os << format_double(t.times[i]);
    for (double x : t.rows[i]) os << "," << format_double(x);
    os << "\n";
  }
}

namespace detail {

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed to write " + path.string());
  return path;
}

inline nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

}  // namespace detail

/// Writes one CSV per series plus summary.json under `dir`; returns the written paths.
inline std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const CriterionReport& r) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto table = [&](const std::string& name, const BlockTable& t) {
    std::ostringstream os;
    write_csv(os, t);
    written.push_back(detail::write_text(dir / name, os.str()));
  };
  {
    std::ostringstream os;
    os << "time,norm_u,norm_v,criterion_integral,W,W_argmax_j,l1_b1\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      os << format_double(r.times[i]) << "," << format_double(r.norm_u[i]) << "," << format_double(r.norm_v[i]) << ","
         << format_double(r.integral[i]) << "," << format_double(r.W[i].value) << "," << r.W[i].j << ","
         << format_double(r.l1_b1[i]) << "\n";
    }
    written.push_back(detail::write_text(dir / "series.csv", os.str()));
  }
  table("blocks.csv", r.w_blocks);
  table("epsilon.csv", r.epsilon);
  table("losing_weight.csv", r.weights);
  {
    std::ostringstream os;
    os << "time,lhs,criterion_integral,C,w_ratio\n";
    const auto& g = r.gronwall;
    for (std::size_t i = 0; i < g.times.size(); ++i) {
      os << format_double(g.times[i]) << "," << format_double(g.lhs[i]) << "," << format_double(g.integral[i]) << ","
         << format_double(g.constant[i]) << "," << format_double(g.w_ratio[i]) << "\n";
    }
    written.push_back(detail::write_text(dir / "gronwall.csv", os.str()));
  }
  const nlohmann::json summary = {
      {"triple", {{"r", r.triple.r}, {"p", detail::finite_or_null(r.triple.p)}, {"q", detail::finite_or_null(r.triple.q)}}},
      {"s", r.losing.s},
      {"lambda", r.losing.lambda},
      {"t_star", r.window.t_star},
      {"t_star_index", r.window.index},
      {"growth_exponent_K", r.growth_exponent},
      {"gronwall_sup_C", detail::finite_or_null(r.gronwall.sup_constant)},
      {"gronwall_degenerate", r.gronwall.degenerate},
      {"gronwall_envelope_holds", envelope_holds(r.gronwall, r.gronwall.sup_constant)},
      {"epsilon_monotone", r.epsilon_monotone},
      {"epsilon_growth_bound_holds", r.epsilon_excess <= 1e-12 * std::max(1.0, r.l1_b1.back())},
      {"W_final", r.W.back().value},
      {"W_max", [&] {
         double m = 0.0;
         for (const auto& w : r.W) m = std::max(m, w.value);
         return m;
       }()}};
  written.push_back(detail::write_text(dir / "summary.json", summary.dump(2) + "\n"));
  return written;
}

}  // namespace lplab
