#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "lplab/cutoffs.hpp"
#include "lplab/field.hpp"
#include "lplab/format.hpp"
#include "lplab/parallel.hpp"
#include "lplab/random.hpp"

namespace lplab {

/// One exponent configuration (p, q, alpha) of the forward Bernstein inequality.
struct BernsteinCase {
  double p = 2.0;
  double q = 2.0;
  std::array<int, 3> alpha{1, 0, 0};
};

struct BernsteinEnsemble {
  Grid grid{3, 64};
  int j_first = 1;
  /// Last block; defaults to j_max - 1 (the top block is cut by the grid).
  int j_last = -100;
  std::vector<BernsteinCase> cases;
  int ensemble_size = 100;
  std::uint64_t seed = 7;
  bool reverse = true;
};

struct BernsteinRow {
  int j = 0;
  double p = 2.0;
  double q = 2.0;
  std::string alpha;
  double ratio_max = 0.0;
  int ensemble_size = 0;
  std::uint64_t seed = 0;
};

/// Measured Bernstein constants. Forward rows hold
///   max_f ||d^alpha Delta_j f||_q / (2^{j|alpha| + dim j (1/p - 1/q)} ||Delta_j f||_p),
/// reverse rows hold max_f 2^j ||Delta_j f||_2 / ||grad Delta_j f||_2.
struct ConstantReport {
  std::vector<BernsteinCase> cases;
  std::vector<BernsteinRow> rows;
  std::vector<BernsteinRow> reverse_rows;

  /// max_j / min_j of the per-block maxima for cases[c].
  double spread(std::size_t c) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : rows) {
      if (r.alpha != alpha_label(cases[c].alpha) || r.p != cases[c].p || r.q != cases[c].q) continue;
      lo = std::min(lo, r.ratio_max);
      hi = std::max(hi, r.ratio_max);
    }
    return hi / lo;
  }

  double reverse_max() const {
    double m = 0.0;
    for (const auto& r : reverse_rows) m = std::max(m, r.ratio_max);
    return m;
  }

  static std::string alpha_label(const std::array<int, 3>& a) {
    return std::to_string(a[0]) + ":" + std::to_string(a[1]) + ":" + std::to_string(a[2]);
  }
};

inline double inverse_exponent(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// Forward ratio for one field f supported in block j; `deriv` is d^alpha f if already at hand.
inline double bernstein_ratio(const Field& f, int j, const BernsteinCase& cs, const Field* deriv = nullptr) {
  const int dim = f.grid().dim();
  int order = 0;
  for (int a = 0; a < dim; ++a) order += cs.alpha[a];
  const double scale =
      std::pow(2.0, j * order + dim * j * (inverse_exponent(cs.p) - inverse_exponent(cs.q)));
  const double top = deriv ? lp_norm(*deriv, cs.q) : lp_norm(derivative(f, cs.alpha), cs.q);
  return top / (scale * lp_norm(f, cs.p));
}

inline ConstantReport bernstein_report(const BernsteinEnsemble& spec,
                                       const DyadicCutoffs& cut = default_cutoffs()) {
  for (const auto& c : spec.cases) {
    if (c.q < c.p) throw DomainError("Bernstein inequality needs q >= p (got p=" + format_exponent(c.p) +
                                     ", q=" + format_exponent(c.q) + ")");
    if (c.p < 1.0) throw DomainError("Bernstein inequality needs p >= 1");
  }
  const Grid& g = spec.grid;
  const int j_last = spec.j_last == -100 ? g.j_max() - 1 : spec.j_last;
  if (j_last > g.j_max() || spec.j_first < -1) throw RangeError("Bernstein block range outside the grid");

  ConstantReport report;
  report.cases = spec.cases;
  const int members = spec.ensemble_size;
  for (int j = spec.j_first; j <= j_last; ++j) {
    // ratios[m][c], reverse[m]
    std::vector<std::vector<double>> ratios(static_cast<std::size_t>(members),
                                            std::vector<double>(spec.cases.size(), 0.0));
    std::vector<double> reverse(static_cast<std::size_t>(members), 0.0);
    parallel_for(static_cast<std::size_t>(members), [&](std::size_t m) {
      std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(j + 1), static_cast<std::uint64_t>(m)};
      std::mt19937_64 rng(seq);
      const Field f = to_physical(random_block_field(g, j, rng, cut));
      std::map<std::array<int, 3>, Field> derivs;
      for (std::size_t c = 0; c < spec.cases.size(); ++c) {
        const auto& cs = spec.cases[c];
        auto it = derivs.find(cs.alpha);
        if (it == derivs.end()) it = derivs.emplace(cs.alpha, to_physical(derivative(f, cs.alpha))).first;
        ratios[m][c] = bernstein_ratio(f, j, cs, &it->second);
      }
      if (spec.reverse) reverse[m] = std::ldexp(l2_norm(f), j) / gradient_l2_norm(f);
    });
    for (std::size_t c = 0; c < spec.cases.size(); ++c) {
      double mx = 0.0;
      for (const auto& r : ratios) mx = std::max(mx, r[c]);
      report.rows.push_back({j, spec.cases[c].p, spec.cases[c].q, ConstantReport::alpha_label(spec.cases[c].alpha),
                             mx, members, spec.seed});
    }
    if (spec.reverse) {
      report.reverse_rows.push_back(
          {j, 2.0, 2.0, "reverse", *std::ranges::max_element(reverse), members, spec.seed});
    }
  }
  return report;
}

/// CSV with columns j,p,q,alpha,measured_ratio_max,ensemble_size,seed.
inline void write_csv(std::ostream& os, const ConstantReport& report) {
  os << "j,p,q,alpha,measured_ratio_max,ensemble_size,seed\n";
  auto line = [&](const BernsteinRow& r) {
    os << r.j << ',' << format_exponent(r.p) << ',' << format_exponent(r.q) << ',' << r.alpha << ','
       << format_double(r.ratio_max) << ',' << r.ensemble_size << ',' << r.seed << '\n';
  };
  for (const auto& r : report.rows) line(r);
  for (const auto& r : report.reverse_rows) line(r);
}

}  // namespace lplab
