#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lplab/field.hpp"

namespace lplab {

/// Field container layout:
///   8 bytes  magic "LPLABFLD"
///   4 bytes  header length L (uint32, little endian)
///   L bytes  JSON header {dim, n, components, representation, time, viscosity}
///   data     components x n^dim little-endian float64; spectral data is interleaved (re, im).
inline constexpr std::array<char, 8> snapshot_magic{'L', 'P', 'L', 'A', 'B', 'F', 'L', 'D'};

struct SnapshotFile {
  Field field;
  double time = 0.0;
  double viscosity = 0.0;
};

namespace detail {

inline void put_le64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  out.write(bytes, 8);
}

inline double get_le64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline void write_snapshot(std::ostream& out, const Field& f, double time, double viscosity) {
  const nlohmann::json header = {{"dim", f.grid().dim()},
                                 {"n", f.grid().n()},
                                 {"components", f.components()},
                                 {"representation", to_string(f.representation())},
                                 {"time", time},
                                 {"viscosity", viscosity}};
  const std::string text = header.dump();
  out.write(snapshot_magic.data(), snapshot_magic.size());
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((len >> (8 * b)) & 0xffu));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (f.representation() == Representation::physical) {
    for (double v : f.all_samples()) detail::put_le64(out, v);
  } else {
    for (const cplx& v : f.all_coeffs()) {
      detail::put_le64(out, v.real());
      detail::put_le64(out, v.imag());
    }
  }
  if (!out) throw std::runtime_error("failed to write snapshot");
}

inline std::string snapshot_bytes(const Field& f, double time, double viscosity) {
  std::ostringstream out(std::ios::binary);
  write_snapshot(out, f, time, viscosity);
  return out.str();
}

inline void write_snapshot(const std::string& path, const Field& f, double time, double viscosity) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_snapshot(out, f, time, viscosity);
}

inline SnapshotFile read_snapshot(std::istream& in, const std::string& origin = "snapshot") {
  auto bad = [&](const std::string& why) { return ShapeError(origin + ": " + why); };
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != snapshot_magic) throw bad("not a field snapshot (bad magic)");
  unsigned char lenb[4];
  in.read(reinterpret_cast<char*>(lenb), 4);
  if (!in) throw bad("truncated header");
  const std::uint32_t len = lenb[0] | (lenb[1] << 8) | (lenb[2] << 16) | (static_cast<std::uint32_t>(lenb[3]) << 24);
  if (len > (1u << 20)) throw bad("implausible header length");
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw bad("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw bad(std::string("malformed header: ") + e.what());
  }
  const Grid g(header.at("dim").get<int>(), header.at("n").get<int>());
  const int comps = header.at("components").get<int>();
  const std::string rep = header.at("representation").get<std::string>();
  if (rep != "physical" && rep != "spectral") throw bad("unknown representation '" + rep + "'");
  SnapshotFile out{Field(g, comps, rep == "physical" ? Representation::physical : Representation::spectral)};
  out.time = header.at("time").get<double>();
  out.viscosity = header.at("viscosity").get<double>();
  const std::size_t values = g.size() * static_cast<std::size_t>(comps) * (rep == "physical" ? 1 : 2);
  std::vector<unsigned char> raw(values * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw bad("truncated data");
  for (int c = 0; c < comps; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * g.size();
    if (rep == "physical") {
      auto s = out.field.samples(c);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = detail::get_le64(&raw[8 * (base + i)]);
    } else {
      auto co = out.field.coeffs(c);
      for (std::size_t i = 0; i < co.size(); ++i) {
        co[i] = {detail::get_le64(&raw[16 * (base + i)]), detail::get_le64(&raw[16 * (base + i) + 8])};
      }
    }
  }
  return out;
}

inline SnapshotFile read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  return read_snapshot(in, path);
}

}  // namespace lplab
