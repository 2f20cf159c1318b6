#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lplab/product.hpp"
#include "lplab/projection.hpp"
#include "lplab/random.hpp"

namespace lplab {

enum class InitialCondition { taylor_green, random_divfree };

inline const char* to_string(InitialCondition ic) {
  return ic == InitialCondition::taylor_green ? "taylor-green" : "random-divfree";
}

inline InitialCondition parse_initial_condition(const std::string& s) {
  if (s == "taylor-green") return InitialCondition::taylor_green;
  if (s == "random-divfree") return InitialCondition::random_divfree;
  throw ConfigError("unknown initial condition '" + s + "' (expected taylor-green or random-divfree)");
}

struct SolverConfig {
  int dim = 2;
  int n = 64;
  double nu = 1.0;
  double dt = 1e-3;
  double t_end = 0.1;
  Dealiasing dealias = Dealiasing::padding;
  InitialCondition ic = InitialCondition::taylor_green;
  std::uint64_t seed = 1;
  /// Random data: coefficient variance ~ |k|^-slope on 1 <= |k| <= k_max.
  double slope = 4.0;
  double k_max = 8.0;
  /// Taylor-Green peak velocity, or RMS velocity of random data.
  double amplitude = 1.0;
  /// Snapshot every `cadence` steps (the final state is always kept).
  int cadence = 10;
  double cfl = 0.5;

  Grid grid() const { return Grid(dim, n); }
  long steps() const { return std::lround(t_end / dt); }
};

inline void validate(const SolverConfig& c) {
  (void)c.grid();
  if (!(c.nu >= 0.0) || !std::isfinite(c.nu)) throw ConfigError("viscosity must be finite and >= 0");
  if (!(std::abs(c.dt) > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be finite and nonzero");
  if (c.dt < 0.0 && c.nu != 0.0) throw ConfigError("negative dt is only allowed for inviscid runs");
  if (!(c.t_end * c.dt >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must have the sign of dt");
  if (std::abs(static_cast<double>(c.steps()) * c.dt - c.t_end) > 1e-9 * std::max(1.0, std::abs(c.t_end))) {
    throw ConfigError("t_end must be an integer multiple of dt");
  }
  if (c.cadence < 1) throw ConfigError("snapshot cadence must be >= 1");
  if (!(c.amplitude >= 0.0)) throw ConfigError("amplitude must be >= 0");
  if (!(c.k_max >= 1.0)) throw ConfigError("k_max must be >= 1");
  if (!(c.cfl > 0.0)) throw ConfigError("cfl must be positive");
}

/// Taylor-Green vortex: (sin x cos y, -cos x sin y) in 2D, times cos z in 3D.
inline Field taylor_green(const Grid& g, double amplitude = 1.0) {
  Field u = sample_vector(g, [&](double x, double y, double z) {
    const double cz = g.dim() == 3 ? std::cos(z) : 1.0;
    return std::array<double, 3>{amplitude * std::sin(x) * std::cos(y) * cz,
                                 -amplitude * std::cos(x) * std::sin(y) * cz, 0.0};
  });
  return leray_project(u);
}

/// Random divergence-free field rescaled to the requested RMS velocity.
inline Field random_initial(const Grid& g, double k_max, double slope, double rms, std::uint64_t seed) {
  Field u = random_divfree(g, {1.0, k_max, slope}, seed);
  const double norm = l2_norm(u);
  if (norm == 0.0) return u;
  u *= rms * std::sqrt(g.volume()) / norm;
  u.set_solenoidal(true);
  return u;
}

inline Field initial_condition(const SolverConfig& c) {
  const Grid g = c.grid();
  if (c.ic == InitialCondition::taylor_green) return taylor_green(g, c.amplitude);
  return random_initial(g, c.k_max, c.slope, c.amplitude, c.seed);
}

/// -P(u . grad u), mean mode set to zero (it vanishes for divergence-free u).
inline Field nonlinear_term(const Field& u, Dealiasing rule = Dealiasing::padding) {
  Field out = leray_project(advect(u, u, rule));
  out *= -1.0;
  for (int c = 0; c < out.components(); ++c) out.coeffs(c)[0] = 0.0;
  return out;
}

/// du/dt = -P(u . grad u) + nu Lap u.
inline Field nse_rhs(const Field& u, double nu, Dealiasing rule = Dealiasing::padding) {
  return nonlinear_term(u, rule) + nu * laplacian(u);
}

/// Multiplies each mode by exp(-nu |k|^2 tau).
inline Field heat_factor(const Field& f, double nu, double tau) {
  const auto& lat = lattice(f.grid());
  Field out = apply_multiplier(f, [&](std::size_t i) { return std::exp(-nu * lat.k2[i] * tau); });
  out.set_solenoidal(f.solenoidal());
  return out;
}

struct SolverState {
  Field u;
  double time = 0.0;
  long step = 0;
  /// Running value of int_0^t ||grad u||_2^2 dt'.
  double dissipation = 0.0;
};

/// Integrating-factor RK4 (viscous part exact, nonlinear part RK4).
class Stepper {
 public:
  explicit Stepper(SolverConfig config) : config_(std::move(config)) { validate(config_); }

  const SolverConfig& config() const { return config_; }

  /// Advances by config().dt. Throws NumericalAbort on CFL violation or non-finite data.
  void step(SolverState& s) const {
    const double h = config_.dt;
    const double nu = config_.nu;
    const Grid& g = s.u.grid();
    const double speed = sup_norm(s.u);
    if (!std::isfinite(speed)) throw NumericalAbort("non-finite velocity at t=" + std::to_string(s.time));
    const double courant = std::abs(h) * speed / g.spacing();
    if (courant > config_.cfl) {
      throw NumericalAbort("CFL violation at t=" + std::to_string(s.time) + ": dt*|u|_inf/h = " +
                           std::to_string(courant) + " > " + std::to_string(config_.cfl));
    }
    const auto rule = config_.dealias;
    const Field& u = s.u;
    const Field k1 = nonlinear_term(u, rule);
    const Field a = heat_factor(u + (0.5 * h) * k1, nu, 0.5 * h);
    const Field k2 = nonlinear_term(a, rule);
    const Field half_u = heat_factor(u, nu, 0.5 * h);
    const Field b = half_u + (0.5 * h) * k2;
    const Field k3 = nonlinear_term(b, rule);
    const Field full_u = heat_factor(u, nu, h);
    const Field c = full_u + h * heat_factor(k3, nu, 0.5 * h);
    const Field k4 = nonlinear_term(c, rule);

    Field next = full_u + (h / 6.0) * (heat_factor(k1, nu, h) + 2.0 * heat_factor(k2 + k3, nu, 0.5 * h) + k4);
    // Stage-weighted quadrature of the dissipation rate.
    auto rate = [](const Field& f) {
      const double gn = gradient_l2_norm(f);
      return gn * gn;
    };
    s.dissipation += (h / 6.0) * (rate(u) + 2.0 * rate(a) + 2.0 * rate(b) + rate(c));
    s.u = leray_project(next);
    ++s.step;
    s.time = static_cast<double>(s.step) * h;
    for (int comp = 0; comp < s.u.components(); ++comp) {
      for (const auto& v : s.u.coeffs(comp)) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          throw NumericalAbort("non-finite coefficient after step " + std::to_string(s.step));
        }
      }
    }
  }

 private:
  SolverConfig config_;
};

struct Snapshot {
  double time = 0.0;
  Field u;
};

struct StepDiagnostics {
  double time = 0.0;
  double energy = 0.0;       // ||u||_2^2
  double dissipation = 0.0;  // int_0^t ||grad u||_2^2
  double divergence = 0.0;   // ||div u||_2
};

struct Trajectory {
  SolverConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> diagnostics;

  /// |E(t) + 2 nu D(t) - E(0)| / E(0), maximized over snapshots.
  double energy_balance_residual() const {
    if (diagnostics.empty() || diagnostics.front().energy == 0.0) return 0.0;
    const double e0 = diagnostics.front().energy;
    double worst = 0.0;
    for (const auto& d : diagnostics) {
      worst = std::max(worst, std::abs(d.energy + 2.0 * config.nu * d.dissipation - e0) / e0);
    }
    return worst;
  }

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.time);
    return t;
  }
};

namespace detail {
inline StepDiagnostics diagnose(const SolverState& s) {
  const double e = l2_norm(s.u);
  return {s.time, e * e, s.dissipation, divergence_norm(s.u)};
}
}  // namespace detail

/// Integrates from u0 with the stepping of `config`, keeping snapshots per cadence.
/// `on_snapshot`, when set, sees every stored snapshot in order.
inline Trajectory run_from(const SolverConfig& config, const Field& u0,
                           const std::function<void(const Snapshot&)>& on_snapshot = {}) {
  const Stepper stepper(config);
  const Grid g = config.grid();
  if (!(u0.grid() == g) || u0.components() != g.dim()) throw ShapeError("initial velocity does not match config");
  Trajectory traj;
  traj.config = config;
  SolverState state{leray_project(u0)};
  auto keep = [&] {
    traj.snapshots.push_back({state.time, state.u});
    traj.diagnostics.push_back(detail::diagnose(state));
    if (on_snapshot) on_snapshot(traj.snapshots.back());
  };
  keep();
  const long total = config.steps();
  for (long k = 0; k < total; ++k) {
    stepper.step(state);
    if (state.step % config.cadence == 0 || state.step == total) keep();
  }
  return traj;
}

inline Trajectory run(const SolverConfig& config) {
  validate(config);
  return run_from(config, initial_condition(config));
}

/// Divergence-free perturbation with ||p||_2 = delta ||u0||_2, drawn from `seed`.
inline Field twin_perturbation(const SolverConfig& config, const Field& u0, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw ConfigError("perturbation size must be >= 0");
  const Grid g = config.grid();
  Field p = random_divfree(g, {1.0, config.k_max, config.slope}, seed);
  const double np = l2_norm(p);
  if (np > 0.0) p *= delta * l2_norm(u0) / np;
  return p;
}

/// Two trajectories from u0 and u0 + perturbation with identical stepping.
inline std::pair<Trajectory, Trajectory> twin_run(const SolverConfig& config, double delta, std::uint64_t seed) {
  validate(config);
  const Field u0 = initial_condition(config);
  Field v0 = u0;
  if (delta != 0.0) v0 += twin_perturbation(config, u0, delta, seed);
  return {run_from(config, u0), run_from(config, v0)};
}

/// Residual of w_t - nu Lap w + P(w . grad u + v . grad w) = 0 for w = u - v at snapshot `i`,
/// with w_t from the five-point centered difference over snapshots. Returns ||residual||_2 / ||w_t||_2.
inline double difference_residual(const Trajectory& u, const Trajectory& v, std::size_t i) {
  if (u.snapshots.size() != v.snapshots.size()) throw ShapeError("twin trajectories are not aligned");
  if (i < 2 || i + 2 >= u.snapshots.size()) throw RangeError("difference residual needs two snapshots per side");
  const auto w = [&](std::size_t k) { return u.snapshots[k].u - v.snapshots[k].u; };
  const double h = u.snapshots[i + 1].time - u.snapshots[i].time;
  const Field wt = (1.0 / (12.0 * h)) * (w(i - 2) - 8.0 * w(i - 1) + 8.0 * w(i + 1) - w(i + 2));
  const Field& ui = u.snapshots[i].u;
  const Field& vi = v.snapshots[i].u;
  const Field wi = w(i);
  const auto rule = u.config.dealias;
  const Field transport = leray_project(advect(wi, ui, rule) + advect(vi, wi, rule));
  const Field residual = wt - u.config.nu * laplacian(wi) + transport;
  const double scale = l2_norm(wt);
  return scale > 0.0 ? l2_norm(residual) / scale : l2_norm(residual);
}

}  // namespace lplab
