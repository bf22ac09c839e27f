#pragma once

#include <filesystem>
#include <json.hpp>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vortex/capacity.hpp"
#include "vortex/routh.hpp"
#include "vortex/semilinear.hpp"

namespace vortex::cli {

using Json = nlohmann::ordered_json;

// Run configuration: a JSON document with blocks "domain", "physics", "numerics", "output".
// Every accessor writes the default it falls back on into the document, so the echoed
// config in the manifest is complete.
class Config {
 public:
  Config() : j_(Json::object()) {}
  explicit Config(Json j);

  static Config load(const std::filesystem::path& path);
  static Config parse(std::string_view text);

  // preset values go underneath explicit ones
  void apply_preset();
  // VORTEX_SET_<block>__<key>=<json or bare string>; entries are "NAME=VALUE"
  void apply_env(const std::vector<std::string>& env);

  const Json& json() const { return j_; }
  Json& json() { return j_; }

  std::string command() const;
  void set_command(const std::string& c) { j_["command"] = c; }

  bool has(const std::string& block, const std::string& key) const;
  double num(const std::string& block, const std::string& key, double def);
  double num(const std::string& block, const std::string& key);  // required
  int integer(const std::string& block, const std::string& key, int def);
  bool flag(const std::string& block, const std::string& key, bool def);
  std::string str(const std::string& block, const std::string& key, const std::string& def);
  Vec2 point(const std::string& block, const std::string& key);
  Vec2 point(const std::string& block, const std::string& key, Vec2 def);
  std::vector<double> list(const std::string& block, const std::string& key, const std::vector<double>& def);
  std::vector<double> list(const std::string& block, const std::string& key);
  const Json& node(const std::string& block, const std::string& key) const;

 private:
  Json& slot(const std::string& block, const std::string& key);
  Json j_;
};

std::vector<std::string> preset_names();
Json preset(const std::string& name);

[[noreturn]] void config_error(const std::string& what);

// ---- scenario builders ----

Domain build_domain(Config& c);
Vec2 to_vec2(const Json& v, const std::string& what);
CompactSet build_compact_set(const Json& k);

struct Scenario {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const PoissonSolver> plain;    // Dirichlet on every component
  std::shared_ptr<const PoissonSolver> problem;  // holes floating (multiply connected problems)
  std::shared_ptr<const GreenEvaluator> green;
  BackgroundField q;        // full background for the semilinear problem
  BackgroundField routh_q;  // background without the rotation / free-stream term
  double alpha = 0, w_inf = 0, a0 = 0;
};

// grid, solvers, Green evaluator and background from the config
Scenario build_scenario(Config& c, bool need_grid = true);

RouthConfig build_routh(Config& c, const Scenario& s, bool pair);
ProblemSpec build_problem(Config& c, const Scenario& s, bool pair);
SolveOptions build_solve_options(Config& c);

}  // namespace vortex::cli
