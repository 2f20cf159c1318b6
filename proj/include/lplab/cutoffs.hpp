#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lplab/errors.hpp"

namespace lplab {

/// Shape of the monotone transition of chi between the plateau and the ball radius.
enum class TransitionProfile {
  /// C-infinity step psi(t) / (psi(t) + psi(1 - t)) with psi(t) = exp(-1/t).
  exp_ratio,
  /// C^2 quintic smoothstep 6t^5 - 15t^4 + 10t^3.
  quintic,
};

inline TransitionProfile parse_profile(const std::string& id) {
  if (id == "exp-ratio" || id == "smooth") return TransitionProfile::exp_ratio;
  if (id == "quintic") return TransitionProfile::quintic;
  throw ConfigError("unknown transition profile '" + id + "'");
}

/// The radial pair (chi, phi) with chi + sum_{j>=0} phi(2^-j r) = 1.
///
/// chi == 1 on r <= 3/4 and chi == 0 on r >= 4/3, so phi(r) = chi(r/2) - chi(r)
/// is supported in 3/4 <= r <= 8/3. Both profiles take the values 0 and 1
/// exactly outside the transition interval, which makes block orthogonality
/// exact in floating point.
class DyadicCutoffs {
 public:
  static constexpr double plateau = 0.75;
  static constexpr double ball = 4.0 / 3.0;
  static constexpr double annulus_outer = 8.0 / 3.0;

  explicit DyadicCutoffs(TransitionProfile profile = TransitionProfile::exp_ratio,
                         std::size_t table_size = 1025, double table_extent = 4.0)
      : profile_(profile) {
    radii_.resize(table_size);
    chi_table_.resize(table_size);
    phi_table_.resize(table_size);
    for (std::size_t i = 0; i < table_size; ++i) {
      const double r = table_extent * static_cast<double>(i) / static_cast<double>(table_size - 1);
      radii_[i] = r;
      chi_table_[i] = chi(r);
      phi_table_[i] = phi(r);
    }
  }

  TransitionProfile profile() const { return profile_; }

  double chi(double r) const {
    if (r <= plateau) return 1.0;
    if (r >= ball) return 0.0;
    const double t = (r - plateau) / (ball - plateau);
    return 1.0 - step(t);
  }

  double phi(double r) const { return chi(0.5 * r) - chi(r); }

  /// Multiplier of Delta_j at radius r: chi for j = -1, phi(2^-j r) for j >= 0, zero below.
  double block(int j, double r) const {
    if (j <= -2) return 0.0;
    if (j == -1) return chi(r);
    return chi(std::ldexp(r, -j - 1)) - chi(std::ldexp(r, -j));
  }

  /// Multiplier of S_j = chi(2^-j D); S_j = 0 for j <= -1 (empty block sum).
  double low_pass(int j, double r) const {
    if (j <= -1) return 0.0;
    return chi(std::ldexp(r, -j));
  }

  const std::vector<double>& table_radii() const { return radii_; }
  const std::vector<double>& chi_table() const { return chi_table_; }
  const std::vector<double>& phi_table() const { return phi_table_; }

 private:
  double step(double t) const {
    if (profile_ == TransitionProfile::quintic) return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  }

  TransitionProfile profile_;
  std::vector<double> radii_;
  std::vector<double> chi_table_;
  std::vector<double> phi_table_;
};

inline DyadicCutoffs build_cutoffs(TransitionProfile profile = TransitionProfile::exp_ratio) {
  return DyadicCutoffs(profile);
}

inline const DyadicCutoffs& default_cutoffs() {
  static const DyadicCutoffs cutoffs;
  return cutoffs;
}

}  // namespace lplab
