#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "lplab/config.hpp"
#include "lplab/snapshot_io.hpp"
#include "lplab/trajectory_io.hpp"

using namespace lplab;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lplab_test_io_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Snapshot, RoundTripSpectralAndPhysical) {
  const Grid g(3, 8);
  const Field s = random_divfree(g, {0.0, 2.5, 0.0}, 3);
  std::stringstream buf;
  write_snapshot(buf, s, 0.25, 0.01);
  const auto back = read_snapshot(buf);
  EXPECT_EQ(back.time, 0.25);
  EXPECT_EQ(back.viscosity, 0.01);
  ASSERT_EQ(back.field.components(), 3);
  const auto a = s.all_coeffs();
  const auto b = back.field.all_coeffs();
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));

  const Field p = to_physical(s.component(1));
  std::stringstream buf2;
  write_snapshot(buf2, p, 1.0, 0.0);
  const auto back2 = read_snapshot(buf2);
  EXPECT_EQ(back2.field.representation(), Representation::physical);
  const auto x = p.all_samples();
  const auto y = back2.field.all_samples();
  EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
}

TEST(Snapshot, LayoutIsLittleEndianAfterMagicAndHeader) {
  const Grid g(2, 8);
  Field f(g, 1, Representation::physical);
  f.samples()[0] = 1.0;
  const std::string bytes = snapshot_bytes(f, 0.0, 1.0);
  EXPECT_EQ(bytes.substr(0, 8), "LPLABFLD");
  const auto len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  const std::string header = bytes.substr(12, len);
  EXPECT_NE(header.find("\"representation\":\"physical\""), std::string::npos);
  // 1.0 = 0x3FF0000000000000, least significant byte first.
  const std::string first = bytes.substr(12 + len, 8);
  EXPECT_EQ(static_cast<unsigned char>(first[7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(first[6]), 0xf0);
  EXPECT_EQ(first[0], 0);
  EXPECT_EQ(bytes.size(), 12 + len + 64 * 8);
}

TEST(Snapshot, RejectsGarbage) {
  std::stringstream junk("not a snapshot at all");
  EXPECT_THROW(read_snapshot(junk), ShapeError);
  const Grid g(2, 8);
  std::string bytes = snapshot_bytes(Field::scalar(g), 0.0, 0.0);
  bytes.resize(bytes.size() - 3);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_snapshot(cut), ShapeError);
}

TEST(Config, ParsesFlatKeyValues) {
  std::stringstream text(
      "# Taylor-Green\n"
      "dim = 2\n"
      "n = 32\n"
      "nu = 0.5   # viscosity\n"
      "dt = 0.01\n"
      "t_end = 0.1\n"
      "dealias = three-halves\n"
      "ic = taylor-green\n");
  const auto c = solver_config_from(parse_key_values(text));
  EXPECT_EQ(c.n, 32);
  EXPECT_EQ(c.nu, 0.5);
  EXPECT_EQ(c.steps(), 10);
  std::stringstream again(to_key_values(c));
  const auto d = solver_config_from(parse_key_values(again));
  EXPECT_EQ(to_json(c), to_json(d));
  EXPECT_EQ(solver_config_from(to_json(c)).dt, c.dt);
}

TEST(Config, RejectsBadInput) {
  std::stringstream unknown("dims = 2\n");
  EXPECT_THROW(solver_config_from(parse_key_values(unknown)), ConfigError);
  std::stringstream noeq("dim 2\n");
  EXPECT_THROW(parse_key_values(noeq), ConfigError);
  std::stringstream dup("n = 8\nn = 16\n");
  EXPECT_THROW(parse_key_values(dup), ConfigError);
  std::stringstream nan_text("nu = fast\n");
  EXPECT_THROW(solver_config_from(parse_key_values(nan_text)), ConfigError);
  std::stringstream bad_n("n = 24\n");
  EXPECT_THROW(solver_config_from(parse_key_values(bad_n)), ConfigError);
}

TEST(Trajectory, StoreAndReload) {
  SolverConfig c;
  c.dim = 2;
  c.n = 16;
  c.dt = 0.01;
  c.t_end = 0.05;
  c.cadence = 2;
  const auto traj = run(c);
  const auto dir = scratch("reload");
  const auto files = write_trajectory(dir, traj);
  EXPECT_EQ(files.size(), traj.snapshots.size() + 1);
  const auto back = read_trajectory(dir);
  ASSERT_EQ(back.snapshots.size(), traj.snapshots.size());
  for (std::size_t i = 0; i < back.snapshots.size(); ++i) {
    EXPECT_EQ(back.snapshots[i].time, traj.snapshots[i].time);
    const auto a = traj.snapshots[i].u.all_coeffs();
    const auto b = back.snapshots[i].u.all_coeffs();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    EXPECT_EQ(back.diagnostics[i].energy, traj.diagnostics[i].energy);
  }
  EXPECT_EQ(to_json(back.config), to_json(c));
  std::filesystem::remove_all(dir);
}
