#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lplab/bernstein.hpp"
#include "lplab/besov.hpp"
#include "lplab/format.hpp"
#include "lplab/navier_stokes.hpp"
#include "lplab/paraproduct.hpp"

namespace lplab {

/// One measured quantity and the bound it must respect (value <= limit, or value >= limit for floors).
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool floor = false;

  bool pass() const { return std::isfinite(value) && (floor ? value >= limit : value <= limit); }
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  /// Extra CSV output (the Bernstein constants table).
  std::string csv;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }
  const Check* first_failure() const {
    for (const auto& c : checks) {
      if (!c.pass()) return &c;
    }
    return nullptr;
  }
};

struct VerifyOptions {
  /// Points per axis; 0 picks the suite default.
  int n = 0;
  std::uint64_t seed = 1;
  /// Rule used by every product the suites form. Reference products are always padded.
  Dealiasing dealias = Dealiasing::padding;
  int ensemble = 100;
};

namespace detail {

inline int pick_n(const VerifyOptions& o, int fallback) { return o.n > 0 ? o.n : fallback; }

inline Field band_field(const Grid& g, std::uint64_t seed, int comps = 1) {
  return random_field(g, comps, {0.0, dealiased_radius(g), 0.0}, seed);
}

}  // namespace detail

/// Partition of unity, reconstruction and both orthogonality statements.
inline SuiteResult verify_lp(const VerifyOptions& o) {
  SuiteResult r{"lp"};
  const Grid g(3, detail::pick_n(o, 64));
  const auto& lat = lattice(g);
  const auto& cut = default_cutoffs();
  const double rmax = std::ldexp(1.0, g.j_max());
  double unity = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lat.radius[i] > rmax) continue;
    double sum = cut.block(-1, lat.radius[i]);
    for (int j = 0; j <= g.j_max(); ++j) sum += cut.block(j, lat.radius[i]);
    unity = std::max(unity, std::abs(sum - 1.0));
  }
  r.checks.push_back({"partition of unity residual", unity, 1e-14});

  const Field f = detail::band_field(g, o.seed);
  const Field fs = to_spectral(f);
  const double fn = l2_norm(f);
  r.checks.push_back({"reconstruction relative L2", l2_norm(reconstruct(fs) - fs) / fn, 1e-12});

  const auto b = blocks(fs);
  double ortho = 0.0;
  for (int j = -1; j <= g.j_max(); ++j) {
    for (int k = -1; k <= g.j_max(); ++k) {
      if (std::abs(j - k) >= 2) ortho = std::max(ortho, l2_norm(delta_j(b[static_cast<std::size_t>(k + 1)], j)));
    }
  }
  r.checks.push_back({"Delta_j Delta_k, |j-k|>=2", ortho / fn, 1e-12});

  const Grid g2(2, detail::pick_n(o, 64) * 2);
  const Field h = random_field(g2, 1, {0.0, 0.7 * g2.n() / 2.0, 0.0}, o.seed + 1);
  const double hs = std::pow(l2_norm(h), 2);
  double products = 0.0;
  for (int k = -1; k <= g2.j_max(); ++k) {
    const Field prod = dealiased_product(s_j(h, k - 1), delta_j(h, k), o.dealias);
    for (int j = -1; j <= g2.j_max(); ++j) {
      if (std::abs(j - k) >= 5) products = std::max(products, l2_norm(delta_j(prod, j)));
    }
  }
  r.checks.push_back({"Delta_j(S_{k-1}u Delta_k v), |j-k|>=5", products / hs, 1e-12});

  double telescoping = 0.0;
  for (int j = 0; j <= g.j_max(); ++j) {
    telescoping = std::max(telescoping, max_coeff(s_j(fs, j + 1) - s_j(fs, j) - delta_j(fs, j)));
  }
  r.checks.push_back({"S_{j+1} - S_j - Delta_j", telescoping / max_coeff(fs), 1e-14});
  return r;
}

/// Bony identity against a padded reference product, summand supports and the div-free cancellations.
inline SuiteResult verify_bony(const VerifyOptions& o) {
  SuiteResult r{"bony"};
  const Grid g(2, detail::pick_n(o, 64));
  double identity = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Field u = detail::band_field(g, o.seed + 100 + s);
    const Field v = detail::band_field(g, o.seed + 300 + s);
    const auto parts = bony_decomposition(u, v, o.dealias);
    const Field residual = parts.T_uv + parts.T_vu + parts.R_uv - dealiased_product(u, v, Dealiasing::padding);
    identity = std::max(identity, l2_norm(residual) / (l2_norm(u) * sup_norm(v)));
  }
  r.checks.push_back({"uv - T_u v - T_v u - R(u,v)", identity, 1e-12});

  const auto& lat = lattice(g);
  const Field u = detail::band_field(g, o.seed + 4);
  const Field v = detail::band_field(g, o.seed + 5);
  double outside = 0.0;
  for (int j = 1; j <= g.j_max(); ++j) {
    const Field piece = dealiased_product(s_j(u, j - 1), delta_j(v, j), o.dealias);
    const double lo = std::ldexp(1.0, j) / 12.0;
    const double hi = std::ldexp(1.0, j) * 10.0 / 3.0;
    auto co = piece.coeffs();
    double worst = 0.0;
    for (std::size_t i = 0; i < co.size(); ++i) {
      if (lat.radius[i] <= lo || lat.radius[i] >= hi) worst = std::max(worst, std::abs(co[i]));
    }
    outside = std::max(outside, worst / max_coeff(piece));
  }
  r.checks.push_back({"S_{j-1}u Delta_j v outside its annulus", outside, 1e-12});

  const Field a = random_divfree(g, {0.0, dealiased_radius(g), 0.0}, o.seed + 21);
  const Field w = detail::band_field(g, o.seed + 30);
  r.checks.push_back({"<v.grad g, g> (scaled)",
                      std::abs(inner(advect(a, w, o.dealias), w)) / (sup_norm(a) * l2_norm(w) * gradient_l2_norm(w)),
                      1e-11});
  const Field wv = detail::band_field(g, o.seed + 31, 2);
  double pairing = 0.0;
  for (int j = 0; j <= g.j_max(); ++j) {
    const Field wj = delta_j(wv, j);
    for (int jp = -1; jp <= g.j_max(); ++jp) {
      const Field aj = delta_j(a, jp);
      const double scale = sup_norm(aj) * l2_norm(wj) * gradient_l2_norm(wj);
      if (scale > 0.0) pairing = std::max(pairing, std::abs(inner(advect(aj, wj, o.dealias), wj)) / scale);
    }
  }
  r.checks.push_back({"<d_i w_j Delta_j' v^i, w_j> (scaled)", pairing, 1e-11});
  return r;
}

/// Forward constants for (p,q,|alpha|) in {(2,2,1), (2,inf,0), (inf,inf,1)} and the reverse constant.
inline SuiteResult verify_bernstein(const VerifyOptions& o) {
  SuiteResult r{"bernstein"};
  BernsteinEnsemble spec;
  spec.grid = Grid(3, detail::pick_n(o, 64));
  spec.j_first = 1;
  spec.cases = {{2.0, 2.0, {1, 0, 0}}, {2.0, infinity, {0, 0, 0}}, {infinity, infinity, {1, 0, 0}}};
  spec.ensemble_size = o.ensemble;
  spec.seed = o.seed;
  const auto report = bernstein_report(spec);
  for (std::size_t c = 0; c < spec.cases.size(); ++c) {
    const auto& cs = spec.cases[c];
    r.checks.push_back({"spread over j, (p,q,alpha)=(" + format_exponent(cs.p) + "," + format_exponent(cs.q) + "," +
                            ConstantReport::alpha_label(cs.alpha) + ")",
                        report.spread(c), 4.0});
  }
  r.checks.push_back({"reverse constant", report.reverse_max(), 4.0 / 3.0 * 1.1});
  std::ostringstream csv;
  write_csv(csv, report);
  r.csv = csv.str();
  return r;
}

/// Largest ||u||_{B^1_{inf,inf}} / (||u||_2 + ||curl u||_{B^0_{inf,inf}}) over a random div-free ensemble.
inline double bkm_max_ratio(const Grid& g, int count, std::uint64_t seed, double k_max = 10.0) {
  std::vector<double> ratios(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    const double slope = 2.0 + (m % 5);
    const Field u = random_divfree(g, {1.0, k_max, slope}, seed + static_cast<std::uint64_t>(m));
    ratios[static_cast<std::size_t>(m)] = bkm_ratio(u);
  }
  return *std::max_element(ratios.begin(), ratios.end());
}

inline SuiteResult verify_bkm(const VerifyOptions& o) {
  SuiteResult r{"bkm"};
  const int n = detail::pick_n(o, 32);
  const double coarse = bkm_max_ratio(Grid(3, n), o.ensemble, o.seed);
  const double fine = bkm_max_ratio(Grid(3, 2 * n), o.ensemble, o.seed);
  r.checks.push_back({"max ratio at n=" + std::to_string(n), coarse, 1e300});
  r.checks.push_back({"max ratio at n=" + std::to_string(2 * n), fine, 1e300});
  r.checks.push_back({"ratio spread between resolutions", std::max(coarse, fine) / std::min(coarse, fine), 2.0});
  return r;
}

/// Taylor-Green decay, energy balance, time order and the Leray projector.
inline SuiteResult verify_solver(const VerifyOptions& o) {
  SuiteResult r{"solver"};
  SolverConfig c;
  c.dim = 2;
  c.n = detail::pick_n(o, 64);
  c.nu = 1.0;
  c.dt = 0.01;
  c.t_end = 0.5;
  c.dealias = o.dealias;
  const auto tg = run(c);
  const Field& u0 = tg.snapshots.front().u;
  r.checks.push_back({"Taylor-Green vs u0 exp(-2t), relative L2",
                      l2_norm(tg.snapshots.back().u - std::exp(-1.0) * u0) / l2_norm(u0), 1e-8});
  r.checks.push_back({"energy balance residual", tg.energy_balance_residual(), 1e-6});

  SolverConfig rc;
  rc.dim = 2;
  rc.n = 16;
  rc.nu = 0.05;
  rc.ic = InitialCondition::random_divfree;
  rc.seed = o.seed;
  rc.k_max = 5.0;
  rc.slope = 2.0;
  rc.cadence = 1000000;
  rc.dealias = o.dealias;
  const double t_end = 0.4;
  auto final_state = [&](int steps) {
    rc.dt = t_end / steps;
    rc.t_end = t_end;
    return run(rc).snapshots.back().u;
  };
  const Field ref = final_state(128);
  const double e8 = l2_norm(final_state(8) - ref);
  const double e16 = l2_norm(final_state(16) - ref);
  const double e32 = l2_norm(final_state(32) - ref);
  Check order{"RK4 observed order", std::min(std::log2(e8 / e16), std::log2(e16 / e32)), 3.5, true};
  r.checks.push_back(order);

  const Grid g(3, 32);
  const Field phi = random_field(g, 1, {0.0, dealiased_radius(g), 0.0}, o.seed);
  const Field grad = gradient(phi);
  r.checks.push_back({"Leray projection of a gradient", l2_norm(leray_project(grad)) / l2_norm(grad), 1e-13});
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lp", "bony", "bernstein", "bkm", "solver"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const VerifyOptions& o) {
  if (name == "lp") return verify_lp(o);
  if (name == "bony") return verify_bony(o);
  if (name == "bernstein") return verify_bernstein(o);
  if (name == "bkm") return verify_bkm(o);
  if (name == "solver") return verify_solver(o);
  throw ConfigError("unknown suite '" + name + "' (expected all, lp, bony, bernstein, bkm or solver)");
}

inline void print_table(std::ostream& os, const SuiteResult& r) {
  for (const auto& c : r.checks) {
    os << r.suite << "  " << (c.pass() ? "ok  " : "FAIL") << "  " << c.name << " = " << format_double(c.value)
       << (c.floor ? "  (>= " : "  (<= ") << format_exponent(c.limit) << ")\n";
  }
}

}  // namespace lplab
