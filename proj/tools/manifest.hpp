#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>
#include <json.hpp>

namespace lplab::cli {

/// Git blob id of a byte string: sha1("blob <size>\0" + bytes).
inline std::string git_blob_sha1(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Record of one command: arguments, configuration, seeds, versions, artifact hashes and timing.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["arguments"] = std::move(args);
    doc_["config"] = nlohmann::json::object();
    doc_["seeds"] = nlohmann::json::object();
    doc_["versions"] = {{"lplab", LPLAB_VERSION}, {"fftw", std::string(fftw_version)}, {"compiler", compiler()}};
    doc_["files"] = nlohmann::json::array();
  }

  nlohmann::json& config() { return doc_["config"]; }
  void seed(const std::string& name, std::uint64_t value) { doc_["seeds"][name] = value; }

  void add_file(const std::filesystem::path& path, const std::filesystem::path& root) {
    const std::string bytes = read_bytes(path);
    doc_["files"].push_back({{"path", std::filesystem::relative(path, root).generic_string()},
                             {"bytes", bytes.size()},
                             {"sha1", git_blob_sha1(bytes)}});
  }

  void add_files(const std::vector<std::filesystem::path>& paths, const std::filesystem::path& root) {
    for (const auto& p : paths) add_file(p, root);
  }

  /// Writes manifest.json under `dir` and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["timings"] = {{"wall_seconds", wall}};
    std::filesystem::create_directories(dir);
    const auto path = dir / "manifest.json";
    std::ofstream out(path);
    out << doc_.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed to write " + path.string());
    return path;
  }

 private:
  static std::string compiler() {
#if defined(__clang__)
    return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    return std::string("gcc ") + __VERSION__;
#else
    return "unknown";
#endif
  }

  std::chrono::steady_clock::time_point start_;
  nlohmann::json doc_;
};

}  // namespace lplab::cli
