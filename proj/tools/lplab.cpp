#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lplab/besov.hpp"
#include "lplab/config.hpp"
#include "lplab/monitor.hpp"
#include "lplab/parallel.hpp"
#include "lplab/snapshot_io.hpp"
#include "lplab/trajectory_io.hpp"
#include "lplab/verify.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace lplab;

namespace {

enum Exit { ok = 0, assertion = 1, usage = 2, numerical = 3 };

/// Config keys that every run command also accepts as flags (--t-end sets t_end, ...).
const std::vector<std::string> config_keys{"dim", "n", "nu", "dt", "t_end", "dealias", "ic",
                                           "seed", "slope", "k_max", "amplitude", "cadence", "cfl"};

struct RunOptions {
  std::string config;
  std::map<std::string, std::string> overrides;
};

void add_run_options(CLI::App* cmd, RunOptions& opts, bool with_seed) {
  cmd->add_option("--config", opts.config, "flat key = value configuration file")->check(CLI::ExistingFile);
  for (const auto& key : config_keys) {
    if (key == "seed" && !with_seed) continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(flag, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
                                           "override config key '" + key + "'");
  }
}

SolverConfig resolve_config(const RunOptions& opts) {
  KeyValues kv = opts.config.empty() ? KeyValues{} : read_key_values(opts.config);
  for (const auto& [k, v] : opts.overrides) kv[k] = v;
  return solver_config_from(kv);
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LPLAB_OUT"); env && *env) return env;
  return "lplab_out";
}

CriterionTriple parse_triple(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
  if (parts.size() != 3) throw ConfigError("--triple expects r,p,q");
  CriterionTriple t;
  t.r = detail::parse_real("r", parts[0]);
  t.p = detail::parse_real("p", parts[1]);
  t.q = detail::parse_real("q", parts[2]);
  return t;
}

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(format_double(x)); }

fs::path write_json(const fs::path& path, const nlohmann::json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed to write " + path.string());
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley, Besov and Navier-Stokes diagnostics on the periodic box"};
  app.require_subcommand(1);
  unsigned threads = 0;
  std::string out_flag;
  app.add_option("--threads", threads, "cap on worker threads (0 = hardware)");
  app.add_option("--out", out_flag, "output directory (default $LPLAB_OUT or ./lplab_out)");
  const std::vector<std::string> args(argv + 1, argv + argc);

  // verify
  auto* verify = app.add_subcommand("verify", "run property suites and print measured constants");
  std::string suite = "all";
  VerifyOptions vopts;
  bool no_dealias = false;
  verify->add_option("--suite", suite, "all | lp | bony | bernstein | bkm | solver");
  verify->add_option("--n", vopts.n, "points per axis (0 = suite default)");
  verify->add_option("--seed", vopts.seed, "ensemble seed");
  verify->add_option("--ensemble", vopts.ensemble, "random fields per block / per resolution");
  verify->add_flag("--no-dealias", no_dealias)->group("");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "integrate Navier-Stokes and store the trajectory");
  RunOptions sim_opts;
  add_run_options(simulate, sim_opts, true);

  // twin
  auto* twin = app.add_subcommand("twin", "run base and perturbed trajectories");
  RunOptions twin_opts;
  double delta = 1e-4;
  std::uint64_t twin_seed = 1;
  add_run_options(twin, twin_opts, false);
  twin->add_option("--delta", delta, "relative perturbation size ||w0|| / ||u0||")->required();
  twin->add_option("--seed", twin_seed, "perturbation seed");
  twin->add_option("--ic-seed", twin_opts.overrides["seed"], "seed of random initial data");

  // report
  auto* report = app.add_subcommand("report", "criterion and difference diagnostics for two trajectories");
  std::string dir_u, dir_v, triple_text = "0.5,6,2";
  LosingParams losing;
  report->add_option("--u", dir_u, "trajectory directory of u")->required();
  report->add_option("--v", dir_v, "trajectory directory of v")->required();
  report->add_option("--triple", triple_text, "r,p,q with 2/q+3/p=1+r");
  report->add_option("--s", losing.s, "loss index in (0,1)");
  report->add_option("--lambda", losing.lambda, "weight rate > 0");

  // besov
  auto* besov = app.add_subcommand("besov", "Besov norm of a stored field");
  std::string snap_path, s_text = "0", p_text = "2", q_text = "inf";
  besov->add_option("--snapshot", snap_path, "field container")->required();
  besov->add_option("--s", s_text, "regularity index");
  besov->add_option("--p", p_text, "integrability (number or inf)");
  besov->add_option("--q", q_text, "summability (number or inf)");

  // split
  auto* split = app.add_subcommand("split", "low/high split of a stored field");
  std::string split_snap, sp = "6", sq = "2", sr = "0.5";
  split->add_option("--snapshot", split_snap, "field container")->required();
  split->add_option("--p", sp, "p");
  split->add_option("--q", sq, "q");
  split->add_option("--r", sr, "r");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }
  if (threads > 0) set_max_threads(threads);
  const fs::path out = output_dir(out_flag);

  try {
    if (*verify) {
      vopts.dealias = no_dealias ? Dealiasing::none : Dealiasing::padding;
      const std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
      if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
        throw ConfigError("unknown suite '" + suite + "' (expected all, lp, bony, bernstein, bkm or solver)");
      }
      cli::RunManifest manifest("verify", args);
      manifest.config() = {{"suite", suite}, {"n", vopts.n}, {"ensemble", vopts.ensemble},
                           {"dealias", to_string(vopts.dealias)}};
      manifest.seed("ensemble", vopts.seed);
      bool all_pass = true;
      const Check* failure = nullptr;
      std::vector<SuiteResult> results;
      for (const auto& name : names) {
        results.push_back(run_suite(name, vopts));
        const auto& r = results.back();
        print_table(std::cout, r);
        if (!r.csv.empty()) {
          const auto path = out / (r.suite + "_constants.csv");
          fs::create_directories(out);
          std::ofstream(path, std::ios::binary) << r.csv;
          std::cout << r.suite << "  constants written to " << path.string() << "\n";
          manifest.add_file(path, out);
        }
        if (!r.pass() && all_pass) {
          all_pass = false;
          failure = r.first_failure();
          std::cout << "first failing assertion: [" << r.suite << "] " << failure->name << "\n";
        }
      }
      manifest.write(out);
      std::cout << (all_pass ? "PASS" : "FAIL") << "\n";
      return all_pass ? ok : assertion;
    }

    if (*simulate) {
      const SolverConfig c = resolve_config(sim_opts);
      cli::RunManifest manifest("simulate", args);
      manifest.config() = to_json(c);
      manifest.seed("initial_condition", c.seed);
      const auto traj = run(c);
      manifest.add_files(write_trajectory(out, traj), out);
      manifest.write(out);
      std::cout << "stored " << traj.snapshots.size() << " snapshots in " << out.string()
                << "; energy balance residual " << format_double(traj.energy_balance_residual()) << "\n";
      return ok;
    }

    if (*twin) {
      if (twin_opts.overrides["seed"].empty()) twin_opts.overrides.erase("seed");
      const SolverConfig c = resolve_config(twin_opts);
      if (!(delta >= 0.0)) throw ConfigError("--delta must be >= 0");
      cli::RunManifest manifest("twin", args);
      manifest.config() = to_json(c);
      manifest.config()["delta"] = delta;
      manifest.seed("initial_condition", c.seed);
      manifest.seed("perturbation", twin_seed);
      const auto [u, v] = twin_run(c, delta, twin_seed);
      manifest.add_files(write_trajectory(out / "u", u), out);
      manifest.add_files(write_trajectory(out / "v", v), out);
      manifest.write(out);
      std::cout << "twin trajectories in " << (out / "u").string() << " and " << (out / "v").string() << "\n";
      return ok;
    }

    if (*report) {
      const CriterionTriple triple = parse_triple(triple_text);
      validate(triple);
      validate(losing);
      const auto u = read_trajectory(dir_u);
      const auto v = read_trajectory(dir_v);
      cli::RunManifest manifest("report", args);
      manifest.config() = {{"u", dir_u}, {"v", dir_v}, {"triple", {triple.r, number(triple.p), number(triple.q)}},
                           {"s", losing.s}, {"lambda", losing.lambda}};
      const auto r = build_report(u, v, triple, losing);
      manifest.add_files(write_report(out, r), out);
      manifest.write(out);
      std::cout << "t* = " << format_double(r.window.t_star) << ", K = " << format_double(r.growth_exponent)
                << ", sup C = " << format_double(r.gronwall.sup_constant) << "; report in " << out.string() << "\n";
      return ok;
    }

    if (*besov) {
      const BesovSpec spec{detail::parse_real("s", s_text), detail::parse_real("p", p_text),
                           detail::parse_real("q", q_text)};
      validate(spec);
      const auto snap = read_snapshot(snap_path);
      cli::RunManifest manifest("besov", args);
      manifest.config() = {{"snapshot", snap_path}, {"s", spec.s}, {"p", number(spec.p)}, {"q", number(spec.q)}};
      const auto seq = besov_sequence(snap.field, spec);
      nlohmann::json blocks = nlohmann::json::array();
      for (double x : seq) blocks.push_back(x);
      const double norm = besov_norm(snap.field, spec);
      const auto path = write_json(out / "besov.json", {{"time", snap.time}, {"norm", norm}, {"blocks", blocks}});
      manifest.add_file(path, out);
      manifest.write(out);
      std::cout << format_double(norm) << "\n";
      return ok;
    }

    if (*split) {
      const CriterionTriple triple{detail::parse_real("p", sp), detail::parse_real("q", sq),
                                   detail::parse_real("r", sr)};
      validate(triple);
      const auto snap = read_snapshot(split_snap);
      cli::RunManifest manifest("split", args);
      manifest.config() = {{"snapshot", split_snap}, {"r", triple.r}, {"p", number(triple.p)}, {"q", number(triple.q)}};
      const auto s = split_low_high(snap.field, triple);
      const nlohmann::json doc = {{"time", snap.time},
                                  {"norm", s.norm_value},
                                  {"N", s.N},
                                  {"p_tilde", number(s.p_tilde)},
                                  {"q_tilde", number(s.q_tilde)},
                                  {"low_bound_ratio", low_bound_ratio(s, triple)},
                                  {"high_bound_ratio", high_bound_ratio(s, triple)}};
      manifest.add_file(write_json(out / "split.json", doc), out);
      manifest.write(out);
      std::cout << doc.dump(2) << "\n";
      return ok;
    }
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
