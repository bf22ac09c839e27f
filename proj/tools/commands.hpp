#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace vortex::cli {

struct RunOptions {
  int threads = 1;
  bool verbose = false;
  std::optional<double> s;  // capacity --s
};

std::vector<std::string> command_names();

// dispatches on c.command(); writes artifacts through out
void run_command(Config& c, Output& out, const RunOptions& opt);

}  // namespace vortex::cli
