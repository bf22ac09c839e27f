#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "vortex/capacity.hpp"
#include "vortex/error.hpp"
#include "vortex/radial_profile.hpp"

namespace vortex::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json vec(Vec2 v) { return Json::array({v.x, v.y}); }

// JSON has no infinities
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void note(const RunOptions& o, const std::string& msg) {
  if (o.verbose) std::fprintf(stderr, "[vortex] %s\n", msg.c_str());
}

void attach_progress(SolveOptions& so, const RunOptions& o) {
  if (!o.verbose) return;
  so.progress = [](int k, double E, double res) {
    if (k < 0)
      std::fprintf(stderr, "[vortex]   newton %d  residual %.3e\n", -k, res);
    else if (k % 10 == 0 || k == 1)
      std::fprintf(stderr, "[vortex]   picard %d  energy %.12g  residual %.3e\n", k, E, res);
  };
}

Json diag_json(const VortexDiagnostics& d, double eps) {
  Json j;
  j["kappa_eps"] = d.kappa_eps;
  j["x_eps"] = d.empty() ? Json(nullptr) : vec(d.x_eps);
  j["r_bar"] = d.r_bar;
  j["r_ring"] = d.r_ring;
  j["diameter"] = d.diameter;
  j["diam_ratio"] = d.diameter / (2 * eps);
  j["components"] = d.components;
  j["nodes"] = d.nodes;
  j["energy"] = number(d.energy);
  return j;
}

// (x1, x2, u, omega) over the interior nodes
void field_csv(Output& out, const GridField& u, const GridField& omega) {
  const Grid& g = u.grid();
  out.csv("field.csv", {"x1", "x2", "u", "omega"}, [&](std::size_t k, std::vector<double>& r) {
    if (k >= g.interior_count()) return false;
    Vec2 p = g.interior_point(k);
    r = {p.x, p.y, u.interior()[k], omega.interior()[k]};
    return true;
  });
}

void cmd_profile(Config& c, Output& out, const RunOptions& o) {
  const double p = c.num("physics", "p", 3.0), kappa = c.num("physics", "kappa", kTwoPi);
  const double dr = c.num("numerics", "dr", 1e-4);
  const int stride = c.integer("numerics", "profile_stride", 100);
  if (stride < 1) config_error("numerics.profile_stride must be positive");
  note(o, "shooting for the unit profile");
  const RadialProfile prof = solve_unit_profile(p, dr);
  const ProfileForKappa pk = profile_for_kappa(prof, kappa);
  const std::size_t n = prof.v.size();
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; k += stride) idx.push_back(k);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  out.csv("profile.csv", {"r", "V"}, [&](std::size_t i, std::vector<double>& r) {
    if (i >= idx.size()) return false;
    r = {idx[i] * prof.dr, prof.v[idx[i]]};
    return true;
  });
  Json j;
  j["p"] = p;
  j["gamma"] = prof.gamma;
  j["v0"] = prof.v0;
  j["slope1"] = prof.slope1;
  j["ode_residual"] = prof.ode_residual();
  j["kappa"] = kappa;
  j["rho_kappa"] = pk.rho;
  j["limit_constant"] = limit_constant(pk);
  j["core_energy"] = core_energy(pk);
  out.json("profile.json", j);
}

void cmd_green(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, true);
  const GreenEvaluator& G = *s.green;
  const Vec2 y = c.point("physics", "source");
  if (!G.admissible(y)) fail(ErrorCode::OutsideDomain, "the source point is not an interior point");
  note(o, "evaluating G(x, y) on the grid");
  const Grid& g = *s.grid;
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < g.interior_count(); ++k) {
    Vec2 p = g.interior_point(k);
    if (dist(p, y) > 1e-12 && G.admissible(p)) nodes.push_back(k);
  }
  out.csv("green_field.csv", {"x1", "x2", "G"}, [&](std::size_t i, std::vector<double>& r) {
    if (i >= nodes.size()) return false;
    Vec2 p = g.interior_point(nodes[i]);
    r = {p.x, p.y, G.green(p, y)};
    return true;
  });

  // Robin transect: a segment through the source (horizontal across the box by default)
  const Domain& d = G.domain();
  const Box bb = d.bounding_box();
  const Vec2 a = c.point("physics", "transect_from", {bb.lo.x, y.y});
  const Vec2 b = c.point("physics", "transect_to", {bb.hi.x, y.y});
  const int n = c.integer("numerics", "transect_points", 201);
  if (n < 2) config_error("numerics.transect_points must be at least 2");
  std::vector<std::pair<double, Vec2>> pts;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    Vec2 p = a + t * (b - a);
    if (G.admissible(p) && d.distance_to_boundary(p) > 2 * g.h()) pts.push_back({t * dist(a, b), p});
  }
  out.csv("robin_transect.csv", {"s", "x1", "x2", "H"}, [&](std::size_t i, std::vector<double>& r) {
    if (i >= pts.size()) return false;
    r = {pts[i].first, pts[i].second.x, pts[i].second.y, G.robin(pts[i].second)};
    return true;
  });

  Json j;
  static const char* modes[] = {"analytic", "numeric", "star", "whole_plane"};
  j["mode"] = modes[static_cast<int>(G.mode())];
  j["domain"] = d.describe();
  j["h"] = g.h();
  j["source"] = vec(y);
  j["robin_at_source"] = G.robin(y);
  j["field_nodes"] = nodes.size();
  j["transect_points"] = pts.size();
  if (const KoebeData* kd = G.koebe()) {
    Json om = Json::array();
    for (int r = 0; r < kd->omega.rows(); ++r) {
      Json row = Json::array();
      for (int q = 0; q < kd->omega.cols(); ++q) row.push_back(kd->omega(r, q));
      om.push_back(row);
    }
    j["omega"] = om;
    j["omega_condition"] = kd->condition;
  }
  out.json("green.json", j);
}

const char* mode_name(RouthMode m) {
  switch (m) {
    case RouthMode::Single: return "single";
    case RouthMode::Pair: return "pair";
    case RouthMode::Star: return "star";
    case RouthMode::Rotating: return "rotating";
    case RouthMode::FreeStream: return "freestream";
  }
  return "?";
}

void cmd_routh(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, false);
  RouthConfig cfg = build_routh(c, s, false);
  ScanOptions so;
  so.cells = c.integer("numerics", "scan_cells", 0);
  so.starts = c.integer("numerics", "starts", 4);
  note(o, std::string("maximising W in ") + mode_name(cfg.mode) + " mode");
  const RouthMaximum mx = routh_maximize(cfg, so);

  const int nx = c.integer("numerics", "heightmap_n", 64);
  if (nx < 2) config_error("numerics.heightmap_n must be at least 2");
  const Domain& d = cfg.green->domain();
  const Box bb = d.bounding_box();
  // pair mode: W(·, x₋*) over x₊
  out.csv("routh_heightmap.csv", {"x1", "x2", "W"}, [&](std::size_t i, std::vector<double>& r) {
    if (i >= static_cast<std::size_t>(nx * nx)) return false;
    const int a = static_cast<int>(i % nx), b = static_cast<int>(i / nx);
    Vec2 p{bb.lo.x + (a + 0.5) * (bb.hi.x - bb.lo.x) / nx, bb.lo.y + (b + 0.5) * (bb.hi.y - bb.lo.y) / nx};
    double W = kNaN;
    if (cfg.green->admissible(p)) {
      try {
        if (cfg.mode == RouthMode::Pair) {
          const Vec2 xs[2] = {p, mx.points[1]};
          W = routh_eval(cfg, xs);
        } else {
          W = routh_eval(cfg, p);
        }
      } catch (const Error&) {
      }
    }
    r = {p.x, p.y, std::isfinite(W) ? W : kNaN};
    return true;
  });

  Json j;
  j["mode"] = mode_name(cfg.mode);
  j["kappa"] = cfg.kappa;
  if (cfg.mode == RouthMode::Pair) j["kappa_minus"] = cfg.kappa_minus;
  Json pts = Json::array();
  for (Vec2 p : mx.points) pts.push_back(vec(p));
  j["points"] = pts;
  j["value"] = mx.value;
  j["near_boundary"] = mx.near_boundary;
  j["evaluations"] = mx.evaluations;
  if (cfg.mode == RouthMode::Rotating && d.kind() == DomainKind::Disc && d.anchor() == Vec2{}) {
    const double rho = d.params()[0], r2 = rho * rho - cfg.kappa / (kTwoPi * cfg.alpha);
    j["predicted_radius"] = r2 > 0 ? Json(std::sqrt(r2)) : Json(nullptr);
    j["radius"] = norm(mx.points[0]);
  }
  if (cfg.mode == RouthMode::FreeStream && d.kind() == DomainKind::HalfPlaneWindow)
    j["predicted_point"] = vec({s.a0 + cfg.kappa / (4 * kPi * cfg.w_inf), 0.0});
  out.json("routh.json", j);
}

void cmd_dynamics(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, false);
  const Json& vs = c.node("physics", "vortices");
  if (!vs.is_array() || vs.empty()) config_error("physics.vortices must be a non-empty list of {x, kappa}");
  VortexState st;
  for (const auto& v : vs) {
    if (!v.is_object() || !v.contains("x") || !v.contains("kappa") || !v["kappa"].is_number())
      config_error("each vortex needs x and kappa");
    st.x.push_back(to_vec2(v["x"], "vortex position"));
    st.kappa.push_back(v["kappa"].get<double>());
  }
  RouthConfig cfg;
  cfg.green = s.green;
  cfg.kappa = st.kappa[0];
  cfg.background = s.q;
  if (s.alpha != 0) {
    cfg.mode = RouthMode::Rotating;
    cfg.alpha = s.alpha;
    cfg.background = s.routh_q;
  } else if (s.w_inf != 0) {
    cfg.mode = RouthMode::FreeStream;
    cfg.w_inf = s.w_inf;
    cfg.background = s.routh_q;
  }
  const double dt = c.num("numerics", "dt", 1e-3), T = c.num("numerics", "T", 1.0);
  const int every = c.integer("numerics", "record_every", 10);
  note(o, "integrating Kirchhoff's law");
  const Trajectory tr = integrate_dynamics(st, cfg, dt, T, every);

  std::vector<std::string> header{"t"};
  for (std::size_t i = 1; i <= st.x.size(); ++i) {
    header.push_back("x1_" + std::to_string(i));
    header.push_back("x2_" + std::to_string(i));
  }
  header.push_back("W");
  out.csv("trajectory.csv", header, [&](std::size_t i, std::vector<double>& r) {
    if (i >= tr.t.size()) return false;
    r.push_back(tr.t[i]);
    for (Vec2 p : tr.x[i]) {
      r.push_back(p.x);
      r.push_back(p.y);
    }
    r.push_back(tr.W[i]);
    return true;
  });
  Json j;
  j["dt"] = dt;
  j["T"] = T;
  j["records"] = tr.t.size();
  Json fin = Json::array();
  for (Vec2 p : tr.x.back()) fin.push_back(vec(p));
  j["final_positions"] = fin;
  double drift = 0;
  for (double w : tr.W) drift = std::max(drift, std::abs(w - tr.W.front()));
  j["W_initial"] = tr.W.front();
  j["W_max_drift"] = drift;
  out.json("dynamics.json", j);
}

void cmd_solve(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, true);
  ProblemSpec spec = build_problem(c, s, false);
  SolveOptions so = build_solve_options(c);
  attach_progress(so, o);
  note(o, "solving the single-vortex problem");
  SolveResult r = c.has("physics", "center") ? solve_single_at(spec, c.point("physics", "center"), so)
                                             : solve_single(spec, std::nullopt, so);
  spec.far_field_center = r.far_field_center;
  const VortexDiagnostics d = diagnostics(r.u, spec, 1);
  field_csv(out, r.u, d.omega);
  Json j = diag_json(d, spec.eps);
  j["eps"] = spec.eps;
  j["kappa"] = spec.kappa;
  j["rho_kappa"] = profile_for_kappa(solve_unit_profile(spec.p), spec.kappa).rho;
  j["hat_energy"] = r.init_energy;
  j["center"] = r.centers.empty() ? Json(nullptr) : vec(r.centers[0]);
  j["nehari_residual"] = r.nehari_residual;
  j["pde_residual"] = r.pde_residual;
  j["iterations"] = r.iterations;
  j["newton_steps"] = r.newton_steps;
  j["converged"] = r.converged;
  j["theta"] = r.theta;
  out.json("diagnostics.json", j);
}

void cmd_pair(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, true);
  ProblemSpec spec = build_problem(c, s, true);
  SolveOptions so = build_solve_options(c);
  attach_progress(so, o);
  note(o, "solving the vortex-pair problem");
  SolveResult r;
  if (c.has("physics", "centers")) {
    const Json& cs = c.node("physics", "centers");
    if (!cs.is_array() || cs.size() != 2) config_error("physics.centers must hold two points");
    r = solve_pair_at(spec, to_vec2(cs[0], "centers[0]"), to_vec2(cs[1], "centers[1]"), so);
  } else {
    r = solve_pair(spec, std::nullopt, so);
  }
  const VortexDiagnostics dp = diagnostics(r.u, spec, 1), dm = diagnostics(r.u, spec, -1);
  GridField omega = dp.omega;
  for (std::size_t k = 0; k < omega.interior().size(); ++k) omega.interior()[k] += dm.omega.interior()[k];
  field_csv(out, r.u, omega);
  Json j;
  j["plus"] = diag_json(dp, spec.eps);
  j["minus"] = diag_json(dm, spec.eps_minus);
  j["energy"] = r.energy;
  j["hat_energy"] = r.init_energy;
  Json cs = Json::array();
  for (Vec2 p : r.centers) cs.push_back(vec(p));
  j["centers"] = cs;
  j["nehari_residual_plus"] = r.nehari_residual;
  j["nehari_residual_minus"] = r.nehari_residual_minus;
  j["pde_residual"] = r.pde_residual;
  j["iterations"] = r.iterations;
  j["newton_steps"] = r.newton_steps;
  j["converged"] = r.converged;
  out.json("diagnostics.json", j);
}

void cmd_sweep(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, true);
  ProblemSpec spec = build_problem(c, s, false);
  SolveOptions so = build_solve_options(c);
  attach_progress(so, o);
  const std::vector<double> eps = c.list("physics", "eps_list", {0.1, 0.05, 0.025});
  note(o, "running the ε-sweep");
  const SweepReport rep = epsilon_sweep(spec, eps, so);
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    Json q;
    q["eps"] = p.eps;
    q["kappa_eps"] = p.kappa_eps;
    q["x_eps"] = vec(p.x_eps);
    q["x_eps_norm"] = norm(p.x_eps);
    q["energy"] = p.energy;
    q["energy_shifted"] = p.energy_shifted;
    q["hat_energy"] = p.hat_energy;
    q["diam_ratio"] = p.diam_ratio;
    q["r_bar"] = p.r_bar;
    q["r_ring"] = p.r_ring;
    q["components"] = p.components;
    q["iterations"] = p.iterations;
    q["converged"] = p.converged;
    q["pde_residual"] = p.pde_residual;
    q["nehari_residual"] = p.nehari_residual;
    pts.push_back(q);
  }
  Json j;
  j["kappa"] = rep.kappa;
  j["rho_kappa"] = rep.rho_kappa;
  j["limit_constant"] = rep.limit_constant;
  j["x_star"] = vec(rep.x_star);
  j["W_star"] = rep.W_star;
  j["points"] = pts;
  j["fit"] = {{"c1", rep.c1}, {"c2", rep.c2}, {"residual", rep.fit_residual}, {"c2_predicted", rep.c2_predicted}};
  j["energy_limit"] = number(rep.energy_limit);
  j["energy_limit_predicted"] = rep.energy_limit_predicted;
  j["final_x_eps_norm"] = norm(rep.points.back().x_eps);
  const Domain& d = spec.grid().domain();
  if (s.alpha != 0 && d.kind() == DomainKind::Disc && d.anchor() == Vec2{} && s.q.radial()) {
    const double r2 = d.params()[0] * d.params()[0] - spec.kappa / (kTwoPi * s.alpha);
    j["predicted_radius"] = r2 > 0 ? Json(std::sqrt(r2)) : Json(nullptr);
  }
  out.json("sweep.json", j);
}

void cmd_capacity(Config& c, Output& out, const RunOptions& o) {
  std::optional<double> s = o.s;
  if (!s && c.has("physics", "s")) s = c.num("physics", "s");
  if (s) {
    c.json()["physics"]["s"] = *s;
    const SegmentRayCapacity r = capacity_segment_ray(*s);
    Json j;
    j["s"] = r.s;
    j["capa"] = r.capa;
    j["lhs"] = r.lhs;
    j["bound"] = r.bound;
    j["bound_ok"] = r.bound_ok;
    if (c.flag("numerics", "cross_check", false)) {
      note(o, "numeric condenser cross-check");
      const SegmentRayNumeric n = segment_ray_numeric(*s, c.num("numerics", "h", 0.0));
      j["numeric"] = {{"capa", n.numeric}, {"rel_error", n.rel_error}, {"t", n.t}, {"h", n.h}};
    }
    out.json("capacity.json", j);
    return;
  }
  const double h = c.num("numerics", "h", 0.01);
  if (!c.has("physics", "K")) {
    note(o, "running the capacity bound suite");
    const BoundsReport rep = check_capacity_bounds(h, c.num("numerics", "capa_slack", 0.02));
    Json checks = Json::array();
    for (const auto& k : rep.checks)
      checks.push_back({{"name", k.name}, {"bound_kind", k.bound}, {"capa", k.capa}, {"lhs", k.lhs}, {"bound", k.rhs},
                        {"slack", k.slack}, {"holds", k.holds}});
    Json j;
    j["h"] = rep.h;
    j["capa_slack"] = rep.capa_slack;
    j["violations"] = rep.violations;
    j["checks"] = checks;
    out.json("capacity.json", j);
    return;
  }
  CapacitySpec spec;
  spec.omega = build_domain(c);
  spec.K = build_compact_set(c.node("physics", "K"));
  spec.h = h;
  const std::string m = c.str("numerics", "solver", "pcg");
  if (m != "pcg" && m != "direct") config_error("numerics.solver must be 'direct' or 'pcg'");
  spec.method = m == "pcg" ? SolverMethod::Pcg : SolverMethod::Direct;
  const CapacityResult r = capacity_numeric(spec);
  Json j;
  j["K"] = spec.K.describe();
  j["domain"] = spec.omega.describe();
  j["capa"] = r.capa;
  j["capa_form"] = r.capa_form;
  j["gap"] = r.gap;
  j["plate_nodes"] = r.plate_nodes;
  j["unknowns"] = r.unknowns;
  // 4π/capa ≤ log(μ(Ω)/μ(K)) whenever both measures are finite and positive
  if (spec.K.area() > 0 && !spec.omega.is_window()) {
    j["bound"] = std::log(spec.omega.area() / spec.K.area());
    j["lhs"] = 4 * kPi / r.capa;
    j["slack"] = j["bound"].get<double>() - j["lhs"].get<double>();
  } else {
    j["bound"] = nullptr;
    j["slack"] = nullptr;
  }
  out.json("capacity.json", j);
}

void cmd_boundary(Config& c, Output& out, const RunOptions& o) {
  Scenario s = build_scenario(c, false);
  const Vec2 xbar = c.point("physics", "xbar");
  const Vec2 x = c.point("physics", "x", {1.0, 0.0});
  const std::vector<double> eps = c.list("physics", "eps_list", {1e-2, 5e-3, 2e-3, 1e-3});
  note(o, "boundary expansion of the Robin function");
  const BoundaryExpansion e = boundary_h_expansion(*s.green, xbar, x, eps);
  out.csv("boundary_asymptotics.csv", {"eps", "r"}, [&](std::size_t i, std::vector<double>& r) {
    if (i >= e.eps.size()) return false;
    r = {e.eps[i], e.r[i]};
    return true;
  });
  Json j;
  j["xbar"] = vec(xbar);
  j["x"] = vec(x);
  j["curvature"] = e.curvature;
  j["predicted"] = e.predicted;
  j["eps"] = e.eps;
  j["r"] = e.r;
  j["limit"] = e.limit;
  const double last = e.r.back();
  j["error"] = e.predicted != 0 ? std::abs(last - e.predicted) / std::abs(e.predicted) : std::abs(last);
  out.json("boundary_asymptotics.json", j);
}

}  // namespace

std::vector<std::string> command_names() {
  return {"profile", "green", "routh", "dynamics", "solve", "pair", "sweep", "capacity", "boundary-asymptotics"};
}

void run_command(Config& c, Output& out, const RunOptions& opt) {
  const std::string cmd = c.command();
  if (cmd == "profile") return cmd_profile(c, out, opt);
  if (cmd == "green") return cmd_green(c, out, opt);
  if (cmd == "routh") return cmd_routh(c, out, opt);
  if (cmd == "dynamics") return cmd_dynamics(c, out, opt);
  if (cmd == "solve") return cmd_solve(c, out, opt);
  if (cmd == "pair") return cmd_pair(c, out, opt);
  if (cmd == "sweep") return cmd_sweep(c, out, opt);
  if (cmd == "capacity") return cmd_capacity(c, out, opt);
  if (cmd == "boundary-asymptotics") return cmd_boundary(c, out, opt);
  config_error(cmd.empty() ? "no command given" : "unknown command '" + cmd + "'");
}

}  // namespace vortex::cli
