#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lplab/errors.hpp"

namespace lplab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform sampling of the periodic box [0, 2pi)^dim with n points per axis.
///
/// Physical samples sit at x_m = 2 pi m / n. Flat indices are row-major with
/// axis 0 slowest. Wavenumbers per axis run over [-n/2, n/2).
class Grid {
 public:
  Grid() = default;

  Grid(int dim, int n) : dim_(dim), n_(n) {
    if (dim != 2 && dim != 3) {
      throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n))) {
      throw ConfigError("points per axis must be a power of two >= 8, got " + std::to_string(n));
    }
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(n_);
    return s;
  }
  double spacing() const { return two_pi / n_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double volume() const { return std::pow(two_pi, dim_); }
  double coordinate(int i) const { return two_pi * i / n_; }
  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }

  /// Largest dyadic block index the grid resolves: log2(n) - 2.
  int j_max() const { return std::bit_width(static_cast<unsigned>(n_)) - 3; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_ = 3;
  int n_ = 32;
};

inline std::string describe(const Grid& g) {
  return std::to_string(g.dim()) + "D n=" + std::to_string(g.n());
}

/// Per-index wavevector tables shared by every field on a grid.
struct Lattice {
  std::vector<std::array<int, 3>> k;
  std::vector<double> k2;
  std::vector<double> radius;
  /// Nonzero when some component equals -n/2 (no Hermitian partner on the grid).
  std::vector<unsigned char> nyquist;
};

namespace detail {

inline std::unique_ptr<Lattice> build_lattice(const Grid& g) {
  auto lat = std::make_unique<Lattice>();
  const std::size_t total = g.size();
  lat->k.resize(total);
  lat->k2.resize(total);
  lat->radius.resize(total);
  lat->nyquist.resize(total);
  const int n = g.n();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::array<int, 3> k{0, 0, 0};
    std::size_t rest = idx;
    for (int a = g.dim() - 1; a >= 0; --a) {
      k[a] = g.wavenumber(static_cast<int>(rest % n));
      rest /= n;
    }
    double k2 = 0.0;
    bool nyq = false;
    for (int a = 0; a < g.dim(); ++a) {
      k2 += static_cast<double>(k[a]) * k[a];
      nyq = nyq || k[a] == -n / 2;
    }
    lat->k[idx] = k;
    lat->k2[idx] = k2;
    lat->radius[idx] = std::sqrt(k2);
    lat->nyquist[idx] = nyq ? 1 : 0;
  }
  return lat;
}

}  // namespace detail

/// Cached lattice tables for a grid; the reference stays valid for the program lifetime.
inline const Lattice& lattice(const Grid& g) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<Lattice>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{g.dim(), g.n()}];
  if (!slot) slot = detail::build_lattice(g);
  return *slot;
}

}  // namespace lplab
