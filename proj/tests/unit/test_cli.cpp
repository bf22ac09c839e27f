#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "vortex/error.hpp"

using namespace vortex;
using namespace vortex::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("vortex_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("config parsing accepts comments and rejects garbage") {
  auto c = Config::parse(R"({
    // a comment
    "domain": {"kind": "disc", "R": 2.0}
  })");
  CHECK(c.num("domain", "R", 1.0) == 2.0);
  CHECK(code_of([] { Config::parse("{ not json"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { Config::parse("[1, 2]"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("defaults are written back") {
  Config c;
  CHECK(c.num("physics", "p", 3.0) == 3.0);
  CHECK(c.json()["physics"]["p"] == 3.0);
  CHECK(code_of([&] { c.num("physics", "kappa"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("presets sit underneath explicit values") {
  auto c = Config::parse(R"({"preset": "rotating", "physics": {"eps": 0.05}})");
  c.apply_preset();
  CHECK(c.num("physics", "eps", 0) == 0.05);
  CHECK(c.num("physics", "alpha", 0) == 1.0);
  CHECK(c.num("physics", "kappa", 0) == doctest::Approx(kPi));
  for (const auto& n : preset_names()) CHECK(preset(n).is_object());

  auto bad = Config::parse(R"({"preset": "nope"})");
  CHECK(code_of([&] { bad.apply_preset(); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("environment overrides") {
  auto c = Config::parse(R"({"physics": {"eps": 0.1}})");
  c.apply_env({"VORTEX_SET_PHYSICS__EPS=0.025", "VORTEX_SET_DOMAIN__KIND=annulus", "VORTEX_SET_COMMAND=sweep",
               "VORTEX_SET_NUMERICS__H=[1]", "HOME=/root", "VORTEX_SET_BROKEN"});
  CHECK(c.num("physics", "eps", 0) == 0.025);
  CHECK(c.str("domain", "kind", "") == "annulus");
  CHECK(c.command() == "sweep");
  CHECK(c.node("numerics", "h").is_array());
}

TEST_CASE("validation errors map to exit status 2, numerical failures to 3") {
  CHECK(is_validation_error(ErrorCode::ConfigInvalid));
  CHECK(is_validation_error(ErrorCode::GridTooCoarseForCore));
  CHECK(is_validation_error(ErrorCode::InvalidGeometry));
  CHECK_FALSE(is_validation_error(ErrorCode::NoConvergence));
  CHECK_FALSE(is_validation_error(ErrorCode::SolverDiverged));
}

TEST_CASE("sha256 of a known string") {
  fs::path d = scratch("sha");
  fs::create_directories(d);
  std::ofstream(d / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(d / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("capacity --s writes the closed form and a complete manifest") {
  fs::path d = scratch("capacity");
  Config c;
  c.set_command("capacity");
  Output out(d);
  RunOptions opt;
  opt.s = 1.0;
  run_command(c, out, opt);
  out.manifest(c.json(), "ok", 0.0, 1);
  auto j = Json::parse(slurp(d / "capacity.json"));
  CHECK(j["capa"].get<double>() == 2.0);
  CHECK(j["bound_ok"].get<bool>());

  auto m = Json::parse(slurp(d / "manifest.json"));
  CHECK(m["status"] == "ok");
  CHECK(m["config"]["command"] == "capacity");
  REQUIRE(m["files"].size() == out.files().size());
  for (const auto& f : m["files"]) CHECK(f["sha256"] == sha256_file(d / f["path"].get<std::string>()));
  CHECK(m["versions"].contains("eigen"));
}

TEST_CASE("routh reports are byte-identical across runs") {
  std::string first;
  for (int k = 0; k < 2; ++k) {
    fs::path d = scratch("routh" + std::to_string(k));
    auto c = Config::parse(R"({"command": "routh", "preset": "rotating"})");
    c.apply_preset();
    Output out(d);
    run_command(c, out, {});
    std::string now = slurp(d / "routh.json") + slurp(d / "routh_heightmap.csv");
    if (k == 0) first = now;
    else CHECK(now == first);
    auto j = Json::parse(slurp(d / "routh.json"));
    CHECK(j["predicted_radius"].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  }
}

TEST_CASE("solve with an unresolved core is a validation error") {
  auto c = Config::parse(R"({"command": "solve", "preset": "disc", "physics": {"eps": 0.002}, "numerics": {"h": 0.02}})");
  c.apply_preset();
  Output out(scratch("coarse"));
  CHECK(code_of([&] { run_command(c, out, {}); }) == ErrorCode::GridTooCoarseForCore);
}

TEST_CASE("unknown command") {
  Config c;
  c.set_command("fly");
  Output out(scratch("unknown"));
  CHECK(code_of([&] { run_command(c, out, {}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("profile artifacts") {
  fs::path d = scratch("profile");
  auto c = Config::parse(R"({"command": "profile", "physics": {"p": 3, "kappa": 6.283185307179586}})");
  Output out(d);
  run_command(c, out, {});
  auto j = Json::parse(slurp(d / "profile.json"));
  CHECK(std::abs(kTwoPi * std::abs(j["slope1"].get<double>()) - j["gamma"].get<double>()) < 1e-8);
  std::ifstream csv(d / "profile.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("r,", 0) == 0);
}
