#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lplab/config.hpp"
#include "lplab/navier_stokes.hpp"
#include "lplab/snapshot_io.hpp"

namespace lplab {

/// Stored trajectory: `trajectory.json` (config, snapshot index, diagnostics) next to
/// one `snap_NNNNNN.fld` container per snapshot.
inline std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.fld", index);
  return buf;
}

/// Writes the trajectory under `dir` (created if needed); returns the written paths.
inline std::vector<std::filesystem::path> write_trajectory(const std::filesystem::path& dir, const Trajectory& t) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  nlohmann::json index = nlohmann::json::array();
  for (std::size_t i = 0; i < t.snapshots.size(); ++i) {
    const auto name = snapshot_name(i);
    write_snapshot((dir / name).string(), t.snapshots[i].u, t.snapshots[i].time, t.config.nu);
    written.push_back(dir / name);
    index.push_back({{"index", i}, {"time", t.snapshots[i].time}, {"file", name}});
  }
  nlohmann::json diag = nlohmann::json::array();
  for (const auto& d : t.diagnostics) {
    diag.push_back({{"time", d.time}, {"energy", d.energy}, {"dissipation", d.dissipation},
                    {"divergence", d.divergence}});
  }
  const nlohmann::json doc = {{"config", to_json(t.config)}, {"snapshots", index}, {"diagnostics", diag}};
  const auto meta = dir / "trajectory.json";
  std::ofstream out(meta);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed to write " + meta.string());
  written.push_back(meta);
  return written;
}

inline Trajectory read_trajectory(const std::filesystem::path& dir) {
  const auto meta = dir / "trajectory.json";
  std::ifstream in(meta);
  if (!in) throw ConfigError("no trajectory.json in '" + dir.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(meta.string() + ": " + e.what());
  }
  Trajectory t;
  t.config = solver_config_from(doc.at("config"));
  for (const auto& entry : doc.at("snapshots")) {
    auto snap = read_snapshot((dir / entry.at("file").get<std::string>()).string());
    t.snapshots.push_back({snap.time, std::move(snap.field)});
  }
  for (const auto& d : doc.at("diagnostics")) {
    t.diagnostics.push_back({d.at("time").get<double>(), d.at("energy").get<double>(),
                             d.at("dissipation").get<double>(), d.at("divergence").get<double>()});
  }
  return t;
}

}  // namespace lplab
