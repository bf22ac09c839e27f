#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"

namespace vortex::cli {

std::string sha256_file(const std::filesystem::path& p);

// Collects every artifact written by a command so the manifest can list it with its hash.
class Output {
 public:
  explicit Output(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

  void json(const std::string& name, const Json& j);
  // header is the comma separated column list; row(i, out) fills one row, returns false when done
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::function<bool(std::size_t, std::vector<double>&)>& row);

  // manifest.json: config echo, versions, wall time, artifact hashes
  void manifest(const Json& config, const std::string& status, double wall_seconds, int threads) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

Json versions();

}  // namespace vortex::cli
