#include "output.hpp"

#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <Eigen/Core>
#include <array>
#include <boost/version.hpp>
#include <cstdio>
#include <fstream>
#include <gsl/gsl_version.h>  // version string only

#include "vortex/error.hpp"

namespace vortex::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigInvalid, "cannot read " + p.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

Output::Output(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::ConfigInvalid, "cannot create output directory " + dir_.string() + ": " + ec.message());
  // a leftover from an earlier failed run would contradict this run's manifest
  fs::remove(dir_ / "error.json", ec);
}

void Output::json(const std::string& name, const Json& j) {
  std::ofstream out(dir_ / name);
  if (!out) fail(ErrorCode::ConfigInvalid, "cannot write " + (dir_ / name).string());
  out << j.dump(2) << '\n';
  files_.push_back(name);
}

void Output::csv(const std::string& name, const std::vector<std::string>& header,
                 const std::function<bool(std::size_t, std::vector<double>&)>& row) {
  std::FILE* f = std::fopen((dir_ / name).c_str(), "w");
  if (!f) fail(ErrorCode::ConfigInvalid, "cannot write " + (dir_ / name).string());
  for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(f, "%s%s", i ? "," : "", header[i].c_str());
  std::fputc('\n', f);
  std::vector<double> r;
  for (std::size_t i = 0;; ++i) {
    r.clear();
    if (!row(i, r)) break;
    for (std::size_t k = 0; k < r.size(); ++k) std::fprintf(f, "%s%.17g", k ? "," : "", r[k]);
    std::fputc('\n', f);
  }
  std::fclose(f);
  files_.push_back(name);
}

Json versions() {
  Json v;
  v["vortex"] = "0.1.0";
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
               std::to_string(BOOST_VERSION % 100);
  v["gsl"] = GSL_VERSION;
  v["openssl"] = OPENSSL_VERSION_TEXT;
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#if defined(__clang__)
  v["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  v["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  return v;
}

void Output::manifest(const Json& config, const std::string& status, double wall_seconds, int threads) const {
  Json m;
  m["status"] = status;
  m["command"] = config.value("command", "");
  m["config"] = config;
  m["versions"] = versions();
  m["threads"] = threads;
  m["wall_time_s"] = wall_seconds;
  Json files = Json::array();
  for (const auto& f : files_) {
    Json e;
    e["path"] = f;
    e["bytes"] = fs::file_size(dir_ / f);
    e["sha256"] = sha256_file(dir_ / f);
    files.push_back(e);
  }
  m["files"] = files;
  std::ofstream out(dir_ / "manifest.json");
  out << m.dump(2) << '\n';
}

}  // namespace vortex::cli
