#include "vortex/routh.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "vortex/error.hpp"
#include "vortex/optimize.hpp"

namespace vortex {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// C² step: 0 for t ≤ 0, 1 for t ≥ 1
double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10 - 15 * t + 6 * t * t);
}
double smoothstep_d(double t) {
  if (t <= 0 || t >= 1) return 0;
  return 30 * t * t * (1 - t) * (1 - t);
}

double wall_offset(const RouthConfig& cfg) {
  if (cfg.green && cfg.green->bounded() && cfg.green->domain().kind() == DomainKind::HalfPlaneWindow)
    return cfg.green->domain().params()[0];
  return 0.0;
}

}  // namespace

BackgroundField BackgroundField::rotation(double alpha) {
  BackgroundField b;
  b.alpha_ = alpha;
  return b;
}

BackgroundField BackgroundField::uniform_flow(double w_inf, double a0) {
  BackgroundField b;
  b.w_inf_ = w_inf;
  b.a0_ = a0;
  return b;
}

BackgroundField BackgroundField::custom(std::function<double(Vec2)> q, std::function<Vec2(Vec2)> grad) {
  BackgroundField b;
  b.custom_ = std::move(q);
  b.custom_grad_ = std::move(grad);
  return b;
}

BackgroundField BackgroundField::from_psi0(GridField psi0, double alpha) {
  BackgroundField b;
  b.psi0_ = std::make_shared<const GridField>(std::move(psi0));
  b.alpha_ = alpha;
  return b;
}

BackgroundField BackgroundField::with_cutoff(const Cutoff& c) const {
  if (!(c.r_in >= 0 && c.r_out > c.r_in)) fail(ErrorCode::InvalidSpec, "cutoff radii must satisfy 0 <= r_in < r_out");
  if (!(c.lift >= 0)) fail(ErrorCode::InvalidSpec, "cutoff lift must be non-negative");
  BackgroundField b = *this;
  b.cutoff_ = c;
  return b;
}

bool BackgroundField::is_zero() const {
  return !psi0_ && alpha_ == 0 && w_inf_ == 0 && !custom_ && !(cutoff_ && cutoff_->lift != 0);
}

bool BackgroundField::radial() const { return !psi0_ && w_inf_ == 0 && !custom_ && !cutoff_; }

double BackgroundField::operator()(Vec2 x) const {
  double q = -0.5 * alpha_ * norm2(x);
  if (psi0_) q -= psi0_->sample(x);
  if (w_inf_ != 0) q += w_inf_ * (x.x - a0_);
  if (custom_) q += custom_(x);
  if (cutoff_) q += cutoff_->lift * smoothstep((dist(x, cutoff_->center) - cutoff_->r_in) / (cutoff_->r_out - cutoff_->r_in));
  return q;
}

Vec2 BackgroundField::gradient(Vec2 x) const {
  Vec2 g = -alpha_ * x;
  if (psi0_) g -= gradient_at(*psi0_, x);
  g.x += w_inf_;
  if (custom_) {
    if (custom_grad_) {
      g += custom_grad_(x);
    } else {
      const double s = 1e-6;
      g += Vec2{(custom_(x + Vec2{s, 0}) - custom_(x - Vec2{s, 0})) / (2 * s),
                (custom_(x + Vec2{0, s}) - custom_(x - Vec2{0, s})) / (2 * s)};
    }
  }
  if (cutoff_) {
    Vec2 d = x - cutoff_->center;
    double r = norm(d), w = cutoff_->r_out - cutoff_->r_in;
    if (r > 0) g += cutoff_->lift * smoothstep_d((r - cutoff_->r_in) / w) / w * (d / r);
  }
  return g;
}

BackgroundField build_stream_q(std::shared_ptr<const Grid> g, const NormalFlux& v_n, const std::vector<double>& gamma,
                               double alpha) {
  const Domain& d = g->domain();
  const int m = d.hole_count();
  if (!gamma.empty() && static_cast<int>(gamma.size()) != m)
    fail(ErrorCode::DimensionMismatch, "one circulation per hole expected");
  const bool any_gamma = std::any_of(gamma.begin(), gamma.end(), [](double v) { return v != 0; });
  if (!v_n && !any_gamma) return BackgroundField::rotation(alpha);
  if (v_n && d.is_window()) fail(ErrorCode::UnsupportedKind, "boundary flux data on truncated windows");

  // cumulative −∫ v_n ds along each component, piece by piece
  constexpr int M = 2048;
  const auto& pieces = d.pieces();
  std::vector<std::vector<double>> table(pieces.size());
  std::vector<double> running(m + 1, 0.0), abs_total(m + 1, 0.0);
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& pc = pieces[p];
    auto& tab = table[p];
    tab.assign(M + 1, 0.0);
    const double ds = pc.length() / M;
    auto point = [&](int k) {
      double t = static_cast<double>(k) / M;
      if (pc.shape == BoundaryPiece::Shape::Segment) return pc.a + t * (pc.b - pc.a);
      double th = pc.theta0 + t * (pc.theta1 - pc.theta0);
      return pc.center + pc.radius * Vec2{std::cos(th), std::sin(th)};
    };
    double prev = v_n ? v_n(point(0), pc.component) : 0.0;
    tab[0] = running[pc.component];
    for (int k = 1; k <= M; ++k) {
      double cur = v_n ? v_n(point(k), pc.component) : 0.0;
      tab[k] = tab[k - 1] - 0.5 * (prev + cur) * ds;
      abs_total[pc.component] += 0.5 * (std::abs(prev) + std::abs(cur)) * ds;
      prev = cur;
    }
    running[pc.component] = tab[M];
  }
  for (int c = 0; c <= m; ++c)
    if (std::abs(running[c]) > 1e-8 * (abs_total[c] + 1e-300) && abs_total[c] > 0)
      fail(ErrorCode::FluxImbalance, "boundary flux does not integrate to zero on component " + std::to_string(c));

  auto bn = g->boundary_nodes();
  std::vector<double> bdata(bn.size(), 0.0);
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const auto& pc = pieces[bn[i].piece];
    double t;
    if (pc.shape == BoundaryPiece::Shape::Segment) {
      t = dot(bn[i].foot - pc.a, pc.b - pc.a) / norm2(pc.b - pc.a);
    } else {
      Vec2 r = bn[i].foot - pc.center;
      double rel = std::atan2(r.y, r.x) - pc.theta0;
      rel = std::fmod(rel, kTwoPi);
      if (rel < 0) rel += kTwoPi;
      t = rel / (pc.theta1 - pc.theta0);
    }
    t = std::clamp(t, 0.0, 1.0) * M;
    int k = std::min(static_cast<int>(t), M - 1);
    double f = t - k;
    const auto& tab = table[bn[i].piece];
    bdata[i] = (1 - f) * tab[k] + f * tab[k + 1];
  }

  std::vector<int> floating;
  for (int c = 1; c <= m; ++c) floating.push_back(c);
  std::vector<double> flux = gamma;
  if (flux.empty()) flux.assign(m, 0.0);
  std::vector<double> zero(g->interior_count(), 0.0);
  try {
    PoissonSolver solver(g, SolverMethod::Direct, floating);
    return BackgroundField::from_psi0(solver.solve(zero, bdata, flux), alpha);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SolverDiverged) fail(ErrorCode::SingularCirculationSystem, e.what());
    throw;
  }
}

void RouthConfig::validate() const {
  if (!green) fail(ErrorCode::InvalidSpec, "Routh configuration needs a Green evaluator");
  switch (mode) {
    case RouthMode::Single:
    case RouthMode::Star:
    case RouthMode::Rotating:
      if (!(kappa > 0)) fail(ErrorCode::NonPositiveKappa, "κ must be positive");
      break;
    case RouthMode::Pair:
      if (!(kappa > 0 && kappa_minus < 0)) fail(ErrorCode::InvalidSpec, "pair mode needs κ₊ > 0 > κ₋");
      break;
    case RouthMode::FreeStream:
      if (!(kappa > 0)) fail(ErrorCode::NonPositiveKappa, "κ must be positive");
      if (!(w_inf > 0)) fail(ErrorCode::InvalidSpec, "free-stream speed must be positive");
      break;
  }
  if (mode == RouthMode::Star && green->mode() != GreenMode::Star)
    fail(ErrorCode::InvalidSpec, "star mode needs a Koebe-assembled Green evaluator");
  if (!green->bounded()) fail(ErrorCode::UndefinedRobin, "a single vortex in the whole plane has no Kirchhoff–Routh function");
}

double RouthConfig::q(Vec2 x) const {
  double v = background(x);
  if (mode == RouthMode::Rotating) v -= 0.5 * alpha * norm2(x);
  if (mode == RouthMode::FreeStream) v += w_inf * (x.x - wall_offset(*this));
  return v;
}

Vec2 RouthConfig::grad_q(Vec2 x) const {
  Vec2 g = background.gradient(x);
  if (mode == RouthMode::Rotating) g -= alpha * x;
  if (mode == RouthMode::FreeStream) g.x += w_inf;
  return g;
}

double kirchhoff_routh(const RouthConfig& cfg, std::span<const Vec2> xs, std::span<const double> kappa) {
  if (xs.size() != kappa.size()) fail(ErrorCode::DimensionMismatch, "one strength per vortex");
  const auto& G = *cfg.green;
  double W = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == xs[j]) fail(ErrorCode::CoincidentPoints, "vortices coincide");
      W += kappa[i] * kappa[j] * G.green(xs[i], xs[j]);
    }
    if (G.bounded()) W += 0.5 * kappa[i] * kappa[i] * G.robin(xs[i]) - kappa[i] * cfg.q(xs[i]);
  }
  return W;
}

std::vector<Vec2> kirchhoff_routh_gradient(const RouthConfig& cfg, std::span<const Vec2> xs,
                                           std::span<const double> kappa) {
  const auto& G = *cfg.green;
  std::vector<Vec2> g(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != i) g[i] += kappa[i] * kappa[j] * G.grad_green(xs[i], xs[j]);
    if (G.bounded()) g[i] += 0.5 * kappa[i] * kappa[i] * G.grad_robin(xs[i]) - kappa[i] * cfg.grad_q(xs[i]);
  }
  return g;
}

double routh_eval(const RouthConfig& cfg, std::span<const Vec2> xs) {
  cfg.validate();
  if (static_cast<int>(xs.size()) != cfg.vortex_count()) fail(ErrorCode::DimensionMismatch, "wrong number of points");
  for (Vec2 x : xs)
    if (!cfg.green->admissible(x)) fail(ErrorCode::OutsideDomain, "point outside the domain");
  if (cfg.mode == RouthMode::Pair) {
    const double k[2] = {cfg.kappa, cfg.kappa_minus};
    return kirchhoff_routh(cfg, xs, k);
  }
  const double k[1] = {cfg.kappa};
  return kirchhoff_routh(cfg, xs, k);
}

ScanGrid routh_scan(const RouthConfig& cfg, int nx, int ny) {
  cfg.validate();
  const Box bb = cfg.green->domain().bounding_box();
  ScanGrid s;
  s.nx = nx;
  s.ny = ny;
  s.x.resize(static_cast<std::size_t>(nx) * ny);
  s.W.assign(s.x.size(), kNegInf);
  const double dx = (bb.hi.x - bb.lo.x) / nx, dy = (bb.hi.y - bb.lo.y) / ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) s.x[j * nx + i] = {bb.lo.x + (i + 0.5) * dx, bb.lo.y + (j + 0.5) * dy};
  if (cfg.mode == RouthMode::Pair) return s;
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    if (!cfg.green->admissible(s.x[k])) continue;
    try {
      s.W[k] = routh_eval(cfg, s.x[k]);
    } catch (const Error&) {
    }
  }
  return s;
}

RouthMaximum routh_maximize(const RouthConfig& cfg, const ScanOptions& opt) {
  cfg.validate();
  const GreenEvaluator& G = *cfg.green;
  const Domain& d = G.domain();
  const Box bb = d.bounding_box();
  const double diam = d.diameter();
  const int cells = opt.cells > 0 ? opt.cells : (G.mode() == GreenMode::Analytic ? 64 : 16);
  const double dx = (bb.hi.x - bb.lo.x) / cells, dy = (bb.hi.y - bb.lo.y) / cells;
  RouthMaximum best;
  best.value = kNegInf;

  auto safe = [&](std::span<const Vec2> xs) {
    ++best.evaluations;
    for (Vec2 x : xs)
      if (!G.admissible(x)) return kNegInf;
    try {
      return routh_eval(cfg, xs);
    } catch (const Error&) {
      return kNegInf;
    }
  };

  if (cfg.mode != RouthMode::Pair) {
    ScanGrid s = routh_scan(cfg, cells, cells);
    std::vector<std::size_t> order(s.x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.W[a] > s.W[b]; });
    if (!std::isfinite(s.W[order[0]])) fail(ErrorCode::NoInteriorMaximum, "W is not finite anywhere on the scan");
    best.evaluations += static_cast<int>(s.x.size());

    // the free-stream function does not depend on x₂: search on the symmetry line
    const bool line = (cfg.mode == RouthMode::FreeStream || cfg.mode == RouthMode::Single) &&
                      G.mode() == GreenMode::Analytic && d.kind() == DomainKind::HalfPlaneWindow &&
                      cfg.background.x2_invariant();
    for (int st = 0; st < opt.starts && st < static_cast<int>(order.size()); ++st) {
      Vec2 x0 = s.x[order[st]];
      if (!std::isfinite(s.W[order[st]])) break;
      SimplexResult r;
      if (line) {
        r = nelder_mead_maximize(
            [&](const std::vector<double>& v) {
              Vec2 p{v[0], 0.0};
              return safe(std::span<const Vec2>(&p, 1));
            },
            {x0.x}, {dx / 2}, 1e-6 * diam, 1e-12);
        r.x.push_back(0.0);
      } else {
        r = nelder_mead_maximize(
            [&](const std::vector<double>& v) {
              Vec2 p{v[0], v[1]};
              return safe(std::span<const Vec2>(&p, 1));
            },
            {x0.x, x0.y}, {dx / 2, dy / 2}, 1e-6 * diam, 1e-12);
      }
      if (r.value > best.value) {
        best.value = r.value;
        best.points = {Vec2{r.x[0], r.x[1]}};
      }
    }
    // rotation invariant problems: report the maximiser on the positive x₁ axis
    if (G.mode() == GreenMode::Analytic && d.kind() == DomainKind::Disc && d.anchor() == Vec2{} &&
        cfg.background.radial() && (cfg.mode == RouthMode::Single || cfg.mode == RouthMode::Rotating)) {
      double r = norm(best.points[0]);
      if (r > 1e-9 * diam) {
        best.points[0] = {r, 0.0};
        best.value = routh_eval(cfg, best.points[0]);
      }
    }
  } else {
    const int pc = opt.cells > 0 ? opt.cells : 16;
    const double px = (bb.hi.x - bb.lo.x) / pc, py = (bb.hi.y - bb.lo.y) / pc;
    std::vector<Vec2> pts;
    for (int j = 0; j < pc; ++j)
      for (int i = 0; i < pc; ++i) {
        Vec2 p{bb.lo.x + (i + 0.5) * px, bb.lo.y + (j + 0.5) * py};
        if (G.admissible(p)) pts.push_back(p);
      }
    struct Cand {
      double W;
      std::size_t a, b;
    };
    std::vector<Cand> cand;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        if (a == b) continue;
        const Vec2 xs[2] = {pts[a], pts[b]};
        double W = safe(xs);
        if (std::isfinite(W)) cand.push_back({W, a, b});
      }
    if (cand.empty()) fail(ErrorCode::NoInteriorMaximum, "W is not finite anywhere on the scan");
    std::partial_sort(cand.begin(), cand.begin() + std::min<std::size_t>(opt.starts, cand.size()), cand.end(),
                      [](const Cand& u, const Cand& v) { return u.W > v.W; });
    const double barrier = 0.25 * std::min(px, py);
    for (int st = 0; st < opt.starts && st < static_cast<int>(cand.size()); ++st) {
      Vec2 a = pts[cand[st].a], b = pts[cand[st].b];
      auto r = nelder_mead_maximize(
          [&](const std::vector<double>& v) {
            const Vec2 xs[2] = {{v[0], v[1]}, {v[2], v[3]}};
            if (dist(xs[0], xs[1]) < barrier) return kNegInf;
            return safe(xs);
          },
          {a.x, a.y, b.x, b.y}, {px / 2, py / 2, px / 2, py / 2}, 1e-6 * diam, 1e-12);
      if (r.value > best.value) {
        best.value = r.value;
        best.points = {Vec2{r.x[0], r.x[1]}, Vec2{r.x[2], r.x[3]}};
      }
    }
    // rotation invariant: turn the configuration so that x₊ sits on the positive x₁ axis
    if (std::isfinite(best.value) && G.mode() == GreenMode::Analytic && d.kind() == DomainKind::Disc &&
        d.anchor() == Vec2{} && cfg.background.radial() && norm(best.points[0]) > 1e-9 * diam) {
      const double c = best.points[0].x / norm(best.points[0]), s = best.points[0].y / norm(best.points[0]);
      for (Vec2& p : best.points) p = {c * p.x + s * p.y, -s * p.x + c * p.y};
      best.value = routh_eval(cfg, best.points);
    }
  }
  if (!std::isfinite(best.value)) fail(ErrorCode::NoInteriorMaximum, "no interior maximum found");
  for (Vec2 p : best.points)
    if (d.distance_to_boundary(p) < std::max(dx, dy)) best.near_boundary = true;
  return best;
}

std::vector<Vec2> vortex_velocities(const RouthConfig& cfg, std::span<const Vec2> xs, std::span<const double> kappa) {
  auto g = kirchhoff_routh_gradient(cfg, xs, kappa);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = perp(g[i]) / kappa[i];
  return g;
}

Trajectory integrate_dynamics(const VortexState& s0, const RouthConfig& cfg, double dt, double T, int record_every) {
  namespace ode = boost::numeric::odeint;
  if (!(dt > 0) || !(T >= 0)) fail(ErrorCode::InvalidSpec, "time step must be positive");
  if (!cfg.green) fail(ErrorCode::InvalidSpec, "dynamics needs a Green evaluator");
  const std::size_t n = s0.x.size();
  if (n == 0 || s0.kappa.size() != n) fail(ErrorCode::DimensionMismatch, "one strength per vortex");
  if (!cfg.green->bounded() && n < 2) fail(ErrorCode::UndefinedRobin, "a lone vortex in the whole plane is undefined");
  for (double k : s0.kappa)
    if (k == 0) fail(ErrorCode::InvalidSpec, "zero-strength vortex");

  using State = std::vector<double>;
  auto unpack = [n](const State& s) {
    std::vector<Vec2> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {s[2 * i], s[2 * i + 1]};
    return x;
  };
  auto check = [&](const std::vector<Vec2>& x) {
    for (Vec2 p : x)
      if (!cfg.green->admissible(p)) fail(ErrorCode::BoundaryEscape, "a vortex left the domain");
  };
  auto rhs = [&](const State& s, State& ds, double) {
    auto x = unpack(s);
    check(x);
    auto v = vortex_velocities(cfg, x, s0.kappa);
    for (std::size_t i = 0; i < n; ++i) {
      ds[2 * i] = v[i].x;
      ds[2 * i + 1] = v[i].y;
    }
  };

  State s(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = s0.x[i].x;
    s[2 * i + 1] = s0.x[i].y;
  }
  Trajectory tr;
  auto record = [&](double t) {
    auto x = unpack(s);
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.W.push_back(kirchhoff_routh(cfg, x, s0.kappa));
  };
  check(s0.x);
  record(s0.t);
  ode::runge_kutta4<State> rk;
  const long steps = std::lround(T / dt);
  for (long k = 1; k <= steps; ++k) {
    auto x = unpack(s);
    auto v = vortex_velocities(cfg, x, s0.kappa);
    double vmax = 0;
    for (Vec2 w : v) vmax = std::max(vmax, norm(w));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (dist(x[i], x[j]) < 10 * dt * vmax) fail(ErrorCode::VortexCollision, "vortices collide");
    rk.do_step(rhs, s, s0.t + (k - 1) * dt, dt);
    if (k % record_every == 0 || k == steps) record(s0.t + k * dt);
  }
  return tr;
}

}  // namespace vortex
