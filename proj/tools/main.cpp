#include <CLI11.hpp>
#include <Eigen/Core>
#include <chrono>
#include <cstdio>
#include <iostream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "vortex/error.hpp"

extern char** environ;

namespace {

using vortex::cli::Json;

int exit_code(vortex::ErrorCode c) { return vortex::is_validation_error(c) ? 2 : 3; }

void report_error(const std::string& code, const std::string& message, int status, vortex::cli::Output* out) {
  Json e;
  e["error"] = code;
  e["message"] = message;
  e["exit_code"] = status;
  std::cerr << e.dump() << '\n';
  if (out) {
    try {
      out->json("error.json", e);
    } catch (...) {
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortex: desingularised point vortices, Kirchhoff–Routh functions and condenser capacities"};
  std::string command, config_path, out_dir, preset;
  int threads = 0;
  bool verbose = false;
  std::optional<double> s;
  app.add_option("command", command, "profile | green | routh | dynamics | solve | pair | sweep | capacity | "
                                     "boundary-asymptotics (overrides the config's command)");
  app.add_option("--config", config_path, "JSON run configuration")->envname("VORTEX_CONFIG");
  app.add_option("--out", out_dir, "output directory (default: output.dir, else ./out)")->envname("VORTEX_OUT");
  app.add_option("--threads", threads, "worker threads for the linear algebra")->envname("VORTEX_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "progress on stderr")->envname("VORTEX_VERBOSE");
  app.add_option("--preset", preset, "scenario preset (rotating, disc, pair-disc, translating, turkington, annulus)");
  app.add_option("--s", s, "capacity: segment–ray gap parameter (no config needed)");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  vortex::cli::Config cfg;
  std::unique_ptr<vortex::cli::Output> out;
  try {
    if (!config_path.empty()) {
      cfg = vortex::cli::Config::load(config_path);
    } else if (!(command == "capacity" && s)) {
      vortex::cli::config_error("--config is required (only `capacity --s S` runs without one)");
    }
    std::vector<std::string> env;
    for (char** e = environ; *e; ++e) env.emplace_back(*e);
    cfg.apply_env(env);
    if (!preset.empty()) cfg.json()["preset"] = preset;
    cfg.apply_preset();
    if (!command.empty()) cfg.set_command(command);
    if (out_dir.empty()) out_dir = cfg.str("output", "dir", "out");
    cfg.json()["output"]["dir"] = out_dir;

    if (threads <= 0) threads = 1;
    Eigen::setNbThreads(threads);
    out = std::make_unique<vortex::cli::Output>(out_dir);

    vortex::cli::RunOptions opt;
    opt.threads = threads;
    opt.verbose = verbose;
    opt.s = s;
    vortex::cli::run_command(cfg, *out, opt);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out->manifest(cfg.json(), "ok", wall, threads);
    if (verbose) std::fprintf(stderr, "[vortex] done in %.2f s, artifacts in %s\n", wall, out_dir.c_str());
    return 0;
  } catch (const vortex::Error& e) {
    const int status = exit_code(e.code());
    report_error(std::string(vortex::to_string(e.code())), e.what(), status, out.get());
    if (out) {
      try {
        out->manifest(cfg.json(), "failed",
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), threads);
      } catch (...) {
      }
    }
    return status;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what(), 3, out.get());
    return 3;
  }
}
