#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "vortex/error.hpp"

namespace vortex::cli {

void config_error(const std::string& what) { fail(ErrorCode::ConfigInvalid, what); }

Config::Config(Json j) : j_(std::move(j)) {
  if (!j_.is_object()) config_error("the configuration must be a JSON object");
}

Config Config::parse(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    config_error(std::string("cannot parse configuration: ") + e.what());
  }
  return Config(std::move(j));
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::apply_preset() {
  if (!j_.contains("preset")) return;
  if (!j_["preset"].is_string()) config_error("preset must be a string");
  Json merged = preset(j_["preset"].get<std::string>());
  merged.merge_patch(j_);
  j_ = std::move(merged);
}

void Config::apply_env(const std::vector<std::string>& env) {
  static constexpr std::string_view kPrefix = "VORTEX_SET_";
  for (const auto& e : env) {
    if (e.rfind(kPrefix, 0) != 0) continue;
    auto eq = e.find('=');
    if (eq == std::string::npos) continue;
    std::string name = e.substr(kPrefix.size(), eq - kPrefix.size());
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
    const std::string raw = e.substr(eq + 1);
    Json v;
    try {
      v = Json::parse(raw);
    } catch (const Json::parse_error&) {
      v = raw;
    }
    auto sep = name.find("__");
    if (sep == std::string::npos) {
      j_[name] = v;
    } else {
      slot(name.substr(0, sep), name.substr(sep + 2)) = v;
    }
  }
}

std::string Config::command() const {
  if (!j_.contains("command")) return {};
  if (!j_["command"].is_string()) config_error("command must be a string");
  return j_["command"].get<std::string>();
}

bool Config::has(const std::string& block, const std::string& key) const {
  return j_.contains(block) && j_[block].is_object() && j_[block].contains(key) && !j_[block][key].is_null();
}

Json& Config::slot(const std::string& block, const std::string& key) {
  Json& b = j_[block];
  if (b.is_null()) b = Json::object();
  if (!b.is_object()) config_error("block '" + block + "' must be an object");
  return b[key];
}

const Json& Config::node(const std::string& block, const std::string& key) const {
  if (!has(block, key)) config_error(block + "." + key + " is required");
  return j_[block][key];
}

double Config::num(const std::string& block, const std::string& key, double def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = def;
  if (!v.is_number()) config_error(block + "." + key + " must be a number");
  return v.get<double>();
}

double Config::num(const std::string& block, const std::string& key) {
  const Json& v = node(block, key);
  if (!v.is_number()) config_error(block + "." + key + " must be a number");
  return v.get<double>();
}

int Config::integer(const std::string& block, const std::string& key, int def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = def;
  if (!v.is_number_integer()) config_error(block + "." + key + " must be an integer");
  return v.get<int>();
}

bool Config::flag(const std::string& block, const std::string& key, bool def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = def;
  if (!v.is_boolean()) config_error(block + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string Config::str(const std::string& block, const std::string& key, const std::string& def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = def;
  if (!v.is_string()) config_error(block + "." + key + " must be a string");
  return v.get<std::string>();
}

Vec2 to_vec2(const Json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_error(what + " must be a pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

Vec2 Config::point(const std::string& block, const std::string& key) { return to_vec2(node(block, key), block + "." + key); }

Vec2 Config::point(const std::string& block, const std::string& key, Vec2 def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = Json::array({def.x, def.y});
  return to_vec2(v, block + "." + key);
}

std::vector<double> Config::list(const std::string& block, const std::string& key, const std::vector<double>& def) {
  Json& v = slot(block, key);
  if (v.is_null()) v = def;
  if (!v.is_array()) config_error(block + "." + key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(block + "." + key + " must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> Config::list(const std::string& block, const std::string& key) {
  node(block, key);
  return list(block, key, {});
}

// ---- presets ----

std::vector<std::string> preset_names() { return {"rotating", "disc", "pair-disc", "translating", "turkington", "annulus"}; }

Json preset(const std::string& name) {
  if (name == "rotating")
    return Json::parse(R"({
      "domain": {"kind": "disc", "R": 1.0},
      "physics": {"p": 3, "kappa": 3.141592653589793, "alpha": 1.0, "eps": 0.025, "eps_list": [0.1, 0.05, 0.025]},
      "numerics": {"h": 0.00390625}})");
  if (name == "disc")
    return Json::parse(R"({
      "domain": {"kind": "disc", "R": 1.0},
      "physics": {"p": 3, "kappa": 6.283185307179586, "eps": 0.05, "eps_list": [0.1, 0.05, 0.025]},
      "numerics": {"h": 0.00390625}})");
  if (name == "pair-disc")
    return Json::parse(R"({
      "domain": {"kind": "disc", "R": 1.0},
      "physics": {"p": 3, "kappa": 6.283185307179586, "kappa_minus": -6.283185307179586, "eps": 0.05, "eps_minus": 0.05},
      "numerics": {"h": 0.00390625}})");
  if (name == "translating")
    return Json::parse(R"({
      "domain": {"kind": "half_plane_window", "a0": 0.0, "width": 3.0, "height": 4.0},
      "physics": {"p": 3, "kappa": 6.283185307179586, "w_inf": 1.0, "eps": 0.05, "eps_list": [0.1, 0.05, 0.025]},
      "numerics": {"h": 0.0078125}})");
  if (name == "turkington")
    return Json::parse(R"({
      "domain": {"kind": "disc_complement_window", "r_obs": 1.0, "width": 5.0, "height": 8.0},
      "physics": {"p": 3, "kappa": 6.283185307179586, "w_inf": 1.0, "eps": 0.05},
      "numerics": {"h": 0.015625}})");
  if (name == "annulus")
    return Json::parse(R"({
      "domain": {"kind": "annulus", "inner": 0.3, "outer": 1.0},
      "physics": {"p": 3, "kappa": 6.283185307179586, "eps": 0.05, "gamma_h": [0.0]},
      "numerics": {"h": 0.0078125, "green": "star"}})");
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  config_error("unknown preset '" + name + "' (known: " + known + ")");
}

// ---- builders ----

Domain build_domain(Config& c) {
  const std::string kind = c.str("domain", "kind", "disc");
  Domain d = [&] {
    if (kind == "disc") return Domain::disc(c.num("domain", "R", 1.0), c.point("domain", "center", {0, 0}));
    if (kind == "rectangle") {
      auto x = c.list("domain", "x", {0.0, 1.0}), y = c.list("domain", "y", {0.0, 1.0});
      if (x.size() != 2 || y.size() != 2) config_error("domain.x and domain.y must have two entries");
      return Domain::rectangle(x[0], x[1], y[0], y[1]);
    }
    if (kind == "annulus") return Domain::annulus(c.num("domain", "inner", 0.5), c.num("domain", "outer", 1.0));
    if (kind == "half_plane_window")
      return Domain::half_plane_window(c.num("domain", "a0", 0.0), c.num("domain", "width", 4.0),
                                       c.num("domain", "height", 4.0));
    if (kind == "disc_complement_window")
      return Domain::disc_complement_window(c.num("domain", "r_obs", 1.0), c.num("domain", "width", 6.0),
                                            c.num("domain", "height", 8.0));
    config_error("unknown domain kind '" + kind +
                 "' (disc, rectangle, annulus, half_plane_window, disc_complement_window)");
  }();
  if (c.has("domain", "holes")) {
    const Json& holes = c.node("domain", "holes");
    if (!holes.is_array()) config_error("domain.holes must be a list");
    for (const auto& h : holes) {
      if (!h.is_object() || !h.contains("radius") || !h["radius"].is_number())
        config_error("each hole needs a center and a radius");
      d = d.with_hole(to_vec2(h.value("center", Json::array({0.0, 0.0})), "hole center"), h["radius"].get<double>());
    }
  }
  return d;
}

CompactSet build_compact_set(const Json& k) {
  if (!k.is_object()) config_error("physics.K must be an object");
  const std::string kind = k.value("kind", "disc");
  if (kind == "disc") {
    if (!k.contains("radius") || !k["radius"].is_number()) config_error("physics.K.radius is required");
    return CompactSet::disc(to_vec2(k.value("center", Json::array({0.0, 0.0})), "K.center"), k["radius"].get<double>());
  }
  if (kind == "rectangle") {
    if (!k.contains("lo") || !k.contains("hi")) config_error("physics.K needs lo and hi corners");
    return CompactSet::rectangle(to_vec2(k["lo"], "K.lo"), to_vec2(k["hi"], "K.hi"));
  }
  if (kind == "segment") {
    if (!k.contains("a") || !k.contains("b")) config_error("physics.K needs end points a and b");
    return CompactSet::segment(to_vec2(k["a"], "K.a"), to_vec2(k["b"], "K.b"));
  }
  config_error("unknown compact set kind '" + kind + "' (disc, rectangle, segment)");
}

namespace {

SolverMethod solver_method(Config& c) {
  const std::string m = c.str("numerics", "solver", "direct");
  if (m == "direct") return SolverMethod::Direct;
  if (m == "pcg") return SolverMethod::Pcg;
  config_error("numerics.solver must be 'direct' or 'pcg'");
}

NormalFlux fourier_flux(const Json& spec, Vec2 center) {
  if (!spec.is_object()) config_error("physics.v_n must be an object with 'cos' and 'sin' coefficient lists");
  auto coeffs = [&](const char* key) {
    std::vector<double> v;
    if (!spec.contains(key)) return v;
    if (!spec[key].is_array()) config_error(std::string("physics.v_n.") + key + " must be a list");
    for (const auto& x : spec[key]) {
      if (!x.is_number()) config_error(std::string("physics.v_n.") + key + " must be a list of numbers");
      v.push_back(x.get<double>());
    }
    return v;
  };
  auto a = coeffs("cos"), b = coeffs("sin");
  // modes k = 1, 2, … in the polar angle about the outer boundary's centre; holes carry no flux
  return [a, b, center](Vec2 p, int component) {
    if (component != 0) return 0.0;
    const double th = std::atan2(p.y - center.y, p.x - center.x);
    double v = 0;
    for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * std::cos((k + 1) * th);
    for (std::size_t k = 0; k < b.size(); ++k) v += b[k] * std::sin((k + 1) * th);
    return v;
  };
}

}  // namespace

Scenario build_scenario(Config& c, bool need_grid) {
  Scenario s;
  const std::string gmode = c.str("numerics", "green", "auto");
  if (gmode == "whole_plane") {
    s.green = GreenEvaluator::whole_plane();
    return s;
  }
  const Domain d = build_domain(c);
  const bool analytic_only = gmode == "analytic" || (gmode == "auto" && d.hole_count() == 0 && GreenEvaluator::has_analytic(d));
  const bool wants_data = c.has("physics", "v_n") || c.has("physics", "gamma_h");
  if (need_grid || !analytic_only || wants_data) {
    s.grid = Grid::build(d, c.num("numerics", "h", 1.0 / 128));
    const SolverMethod m = solver_method(c);
    s.plain = std::make_shared<PoissonSolver>(s.grid, m);
    s.problem = s.plain;
    if (d.hole_count() > 0 && c.flag("physics", "floating_holes", true)) {
      std::vector<int> fl;
      for (int k = 1; k <= d.hole_count(); ++k) fl.push_back(k);
      s.problem = std::make_shared<PoissonSolver>(s.grid, m, fl);
    }
  }

  if (gmode == "analytic") {
    s.green = GreenEvaluator::analytic(d);
  } else if (gmode == "numeric") {
    s.green = GreenEvaluator::numeric(s.plain);
  } else if (gmode == "star") {
    s.green = koebe_assemble(s.plain);
  } else if (gmode == "auto") {
    if (d.hole_count() > 0 && !GreenEvaluator::has_analytic(d))
      s.green = koebe_assemble(s.plain);
    else if (s.plain)
      s.green = GreenEvaluator::best(d, s.plain);
    else
      s.green = GreenEvaluator::analytic(d);
  } else {
    config_error("numerics.green must be auto, analytic, numeric, star or whole_plane");
  }

  s.alpha = c.num("physics", "alpha", 0.0);
  s.w_inf = c.num("physics", "w_inf", 0.0);
  s.a0 = c.num("physics", "a0", d.kind() == DomainKind::HalfPlaneWindow ? d.params()[0] : 0.0);
  std::vector<double> gamma;
  if (c.has("physics", "gamma_h")) gamma = c.list("physics", "gamma_h");
  NormalFlux vn;
  if (c.has("physics", "v_n")) vn = fourier_flux(c.node("physics", "v_n"), d.anchor());
  const bool any_gamma = std::any_of(gamma.begin(), gamma.end(), [](double g) { return g != 0; });
  if (s.w_inf != 0 && (s.alpha != 0 || vn || any_gamma))
    config_error("a free stream cannot be combined with rotation or boundary data");
  if (vn || any_gamma) {
    s.q = build_stream_q(s.grid, vn, gamma, s.alpha);
    s.routh_q = s.alpha != 0 ? build_stream_q(s.grid, vn, gamma, 0.0) : s.q;
  } else if (s.alpha != 0) {
    s.q = BackgroundField::rotation(s.alpha);
  } else if (s.w_inf != 0) {
    s.q = BackgroundField::uniform_flow(s.w_inf, s.a0);
  }
  if (c.has("physics", "cutoff")) {
    const Json& k = c.node("physics", "cutoff");
    if (!k.is_object()) config_error("physics.cutoff must be an object");
    Cutoff cut;
    cut.center = to_vec2(k.value("center", Json::array({0.0, 0.0})), "cutoff.center");
    cut.r_in = k.value("r_in", 0.0);
    cut.r_out = k.value("r_out", 0.0);
    cut.lift = k.value("lift", 0.0);
    s.q = s.q.with_cutoff(cut);
    s.routh_q = s.q;  // the routh side then uses the full background in single mode
    s.alpha = 0;
    s.w_inf = 0;
  }
  return s;
}

RouthConfig build_routh(Config& c, const Scenario& s, bool pair) {
  RouthConfig r;
  r.green = s.green;
  r.kappa = c.num("physics", "kappa", kTwoPi);
  std::string def = "single";
  if (pair)
    def = "pair";
  else if (s.green->mode() == GreenMode::Star)
    def = "star";
  else if (s.alpha != 0)
    def = "rotating";
  else if (s.w_inf != 0)
    def = "freestream";
  const std::string mode = c.str("physics", "mode", def);
  if (mode == "single") {
    r.mode = RouthMode::Single;
  } else if (mode == "pair") {
    r.mode = RouthMode::Pair;
    r.kappa_minus = c.num("physics", "kappa_minus", -r.kappa);
  } else if (mode == "star") {
    r.mode = RouthMode::Star;
  } else if (mode == "rotating") {
    r.mode = RouthMode::Rotating;
    r.alpha = s.alpha;
  } else if (mode == "freestream") {
    r.mode = RouthMode::FreeStream;
    r.w_inf = s.w_inf;
  } else {
    config_error("physics.mode must be single, pair, star, rotating or freestream");
  }
  // the rotating / free-stream terms are added by the mode itself
  r.background = (r.mode == RouthMode::Rotating || r.mode == RouthMode::FreeStream) ? s.routh_q : s.q;
  r.validate();
  return r;
}

ProblemSpec build_problem(Config& c, const Scenario& s, bool pair) {
  if (!s.problem) config_error("the semilinear problem needs a bounded domain and a grid");
  ProblemSpec p;
  p.solver = s.problem;
  p.green = s.green;
  p.p = c.num("physics", "p", 3.0);
  p.kappa = c.num("physics", "kappa", kTwoPi);
  p.eps = c.num("physics", "eps", 0.05);
  p.pair = pair;
  if (pair) {
    p.kappa_minus = c.num("physics", "kappa_minus", -p.kappa);
    p.eps_minus = c.num("physics", "eps_minus", p.eps);
  }
  p.background = s.q;
  const std::string ff = c.str("numerics", "far_field", "green");
  if (ff == "green")
    p.far_field = FarField::GreenMatched;
  else if (ff == "zero")
    p.far_field = FarField::Zero;
  else
    config_error("numerics.far_field must be 'green' or 'zero'");
  return p;
}

SolveOptions build_solve_options(Config& c) {
  SolveOptions o;
  o.refine_center = c.flag("numerics", "refine_center", o.refine_center);
  o.theta = c.num("numerics", "theta", o.theta);
  o.theta_fallback = c.num("numerics", "theta_fallback", o.theta_fallback);
  o.max_iter = c.integer("numerics", "max_iter", o.max_iter);
  o.residual_tol = c.num("numerics", "residual_tol", o.residual_tol);
  o.energy_tol = c.num("numerics", "energy_tol", o.energy_tol);
  o.newton = c.flag("numerics", "newton", o.newton);
  o.newton_switch = c.num("numerics", "newton_switch", o.newton_switch);
  o.picard_before_newton = c.integer("numerics", "picard_before_newton", o.picard_before_newton);
  o.newton_tol = c.num("numerics", "newton_tol", o.newton_tol);
  o.newton_max = c.integer("numerics", "newton_max", o.newton_max);
  if (!(o.theta > 0 && o.theta <= 1) || !(o.theta_fallback > 0 && o.theta_fallback <= 1))
    config_error("numerics.theta and numerics.theta_fallback must lie in (0, 1]");
  if (o.max_iter < 1) config_error("numerics.max_iter must be positive");
  return o;
}

}  // namespace vortex::cli
