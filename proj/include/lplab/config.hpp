#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lplab/format.hpp"
#include "lplab/navier_stokes.hpp"

namespace lplab {

/// Flat `key = value` text: one pair per line, `#` starts a comment, blank lines ignored.
using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline KeyValues parse_key_values(std::istream& in, const std::string& origin = "config") {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in, path);
}

namespace detail {

inline double parse_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return out;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return out;
}

}  // namespace detail

/// Solver configuration from key/values; unknown keys are rejected.
inline SolverConfig solver_config_from(const KeyValues& kv) {
  SolverConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "dim") c.dim = detail::parse_integer<int>(key, value);
    else if (key == "n") c.n = detail::parse_integer<int>(key, value);
    else if (key == "nu" || key == "viscosity") c.nu = detail::parse_real(key, value);
    else if (key == "dt") c.dt = detail::parse_real(key, value);
    else if (key == "t_end") c.t_end = detail::parse_real(key, value);
    else if (key == "dealias") c.dealias = parse_dealiasing(value);
    else if (key == "ic") c.ic = parse_initial_condition(value);
    else if (key == "seed") c.seed = detail::parse_integer<std::uint64_t>(key, value);
    else if (key == "slope") c.slope = detail::parse_real(key, value);
    else if (key == "k_max") c.k_max = detail::parse_real(key, value);
    else if (key == "amplitude") c.amplitude = detail::parse_real(key, value);
    else if (key == "cadence") c.cadence = detail::parse_integer<int>(key, value);
    else if (key == "cfl") c.cfl = detail::parse_real(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  validate(c);
  return c;
}

inline SolverConfig load_solver_config(const std::string& path) {
  return solver_config_from(read_key_values(path));
}

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"dim", c.dim},
          {"n", c.n},
          {"nu", c.nu},
          {"dt", c.dt},
          {"t_end", c.t_end},
          {"dealias", to_string(c.dealias)},
          {"ic", to_string(c.ic)},
          {"seed", c.seed},
          {"slope", c.slope},
          {"k_max", c.k_max},
          {"amplitude", c.amplitude},
          {"cadence", c.cadence},
          {"cfl", c.cfl}};
}

inline SolverConfig solver_config_from(const nlohmann::json& j) {
  SolverConfig c;
  c.dim = j.at("dim").get<int>();
  c.n = j.at("n").get<int>();
  c.nu = j.at("nu").get<double>();
  c.dt = j.at("dt").get<double>();
  c.t_end = j.at("t_end").get<double>();
  c.dealias = parse_dealiasing(j.at("dealias").get<std::string>());
  c.ic = parse_initial_condition(j.at("ic").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.slope = j.at("slope").get<double>();
  c.k_max = j.at("k_max").get<double>();
  c.amplitude = j.at("amplitude").get<double>();
  c.cadence = j.at("cadence").get<int>();
  c.cfl = j.at("cfl").get<double>();
  validate(c);
  return c;
}

/// The configuration as flat key = value text, readable by load_solver_config.
inline std::string to_key_values(const SolverConfig& c) {
  std::ostringstream out;
  out << "dim = " << c.dim << "\n"
      << "n = " << c.n << "\n"
      << "nu = " << format_double(c.nu) << "\n"
      << "dt = " << format_double(c.dt) << "\n"
      << "t_end = " << format_double(c.t_end) << "\n"
      << "dealias = " << to_string(c.dealias) << "\n"
      << "ic = " << to_string(c.ic) << "\n"
      << "seed = " << c.seed << "\n"
      << "slope = " << format_double(c.slope) << "\n"
      << "k_max = " << format_double(c.k_max) << "\n"
      << "amplitude = " << format_double(c.amplitude) << "\n"
      << "cadence = " << c.cadence << "\n"
      << "cfl = " << format_double(c.cfl) << "\n";
  return out.str();
}

}  // namespace lplab
