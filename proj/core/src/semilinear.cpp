#include "vortex/semilinear.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>

#include "vortex/error.hpp"
#include "vortex/optimize.hpp"
#include "vortex/radial_profile.hpp"

namespace vortex {

namespace {

constexpr double kInv2Pi = 1.0 / kTwoPi;

const RadialProfile& cached_profile(double p) {
  static std::mutex m;
  static std::map<double, std::unique_ptr<RadialProfile>> cache;
  std::lock_guard lk(m);
  auto& e = cache[p];
  if (!e) e = std::make_unique<RadialProfile>(solve_unit_profile(p));
  return *e;
}

inline double pw(double t, double p) { return t > 0 ? std::pow(t, p) : 0.0; }

template <class F>
std::pair<double, double> toms748(F f, double a, double b, double fa, double fb) {
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), it);
  return r;
}

// Everything the iteration needs, in terms of v = u − φ (φ: harmonic lift of the far-field data)
// stored as raw solver vectors (interior values, then the floating constants).
struct Context {
  const ProblemSpec& spec;
  const PoissonSolver& S;
  const Grid& G;
  std::size_t n_int, n;
  double h2, p;
  double ie2p, ie2m;
  bool pair;
  std::vector<double> phi_int, phi_bd;
  std::vector<double> s_plus, s_minus;
  std::vector<int> slot;  // boundary node -> floating index or -1
  Vec2 center;

  Context(const ProblemSpec& sp, std::optional<Vec2> ff_center)
      : spec(sp),
        S(*sp.solver),
        G(sp.solver->grid()),
        n_int(G.interior_count()),
        n(S.unknowns()),
        h2(G.h() * G.h()),
        p(sp.p),
        ie2p(1.0 / (sp.eps * sp.eps)),
        ie2m(sp.pair ? 1.0 / (sp.eps_minus * sp.eps_minus) : 0.0),
        pair(sp.pair) {
    auto bn = G.boundary_nodes();
    slot.assign(bn.size(), -1);
    const auto& fl = S.floating();
    for (std::size_t b = 0; b < bn.size(); ++b)
      for (std::size_t f = 0; f < fl.size(); ++f)
        if (fl[f] == bn[b].component) slot[b] = static_cast<int>(f);

    phi_int.assign(n_int, 0.0);
    phi_bd.assign(bn.size(), 0.0);
    const Domain& d = G.domain();
    if (d.is_window() && sp.far_field == FarField::GreenMatched && !sp.pair) {
      Vec2 c = sp.far_field_center ? *sp.far_field_center : ff_center.value_or(Vec2{});
      if (!sp.far_field_center && !ff_center) fail(ErrorCode::InvalidSpec, "far-field matching needs a vortex centre");
      center = c;
      auto an = GreenEvaluator::analytic(d);
      std::vector<double> bdata(bn.size(), 0.0);
      for (std::size_t b = 0; b < bn.size(); ++b) {
        if (bn[b].tag != BoundaryTag::Artificial) continue;
        try {
          bdata[b] = sp.kappa * an->green(c, bn[b].foot);
        } catch (const Error&) {
        }
      }
      std::vector<double> zero(n_int, 0.0);
      GridField phi = S.solve(zero, bdata);
      phi_int = phi.interior();
      phi_bd = phi.boundary();
    }
    s_plus.resize(n_int);
    if (pair) s_minus.resize(n_int);
    for (std::size_t k = 0; k < n_int; ++k) {
      Vec2 x = G.interior_point(k);
      s_plus[k] = sp.q_eps(x) - phi_int[k];
      if (pair) s_minus[k] = sp.q_eps_minus(x) - phi_int[k];
    }
  }

  double omega(std::size_t k, double v) const {
    double w = ie2p * pw(v - s_plus[k], p);
    if (pair) w -= ie2m * pw(s_minus[k] - v, p);
    return w;
  }
  double domega(std::size_t k, double v) const {
    double w = ie2p * p * pw(v - s_plus[k], p - 1);
    if (pair) w += ie2m * p * pw(s_minus[k] - v, p - 1);
    return w;
  }
  double Fpot(std::size_t k, double v) const {
    double w = ie2p * pw(v - s_plus[k], p + 1) / (p + 1);
    if (pair) w += ie2m * pw(s_minus[k] - v, p + 1) / (p + 1);
    return w;
  }

  double form(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return h2 * x.dot(S.matrix() * y); }

  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < n_int; ++k) b[k] = omega(k, x[k]);
    return b;
  }

  double energy(const Eigen::VectorXd& x) const {
    double e = 0.5 * form(x, x);
    for (std::size_t k = 0; k < n_int; ++k) e -= h2 * Fpot(k, x[k]);
    return e;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const { return S.matrix() * x - rhs(x); }

  // ⟨dE(x), y⟩
  double dE(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return h2 * y.dot(residual(x)); }

  GridField to_field(const Eigen::VectorXd& x) const {
    GridField u(S.grid_ptr());
    for (std::size_t k = 0; k < n_int; ++k) u.interior()[k] = phi_int[k] + x[k];
    for (std::size_t b = 0; b < phi_bd.size(); ++b) u.boundary()[b] = phi_bd[b] + (slot[b] >= 0 ? x[n_int + slot[b]] : 0.0);
    return u;
  }

  Eigen::VectorXd from_interior(const std::vector<double>& u_int) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < n_int; ++k) x[k] = u_int[k] - phi_int[k];
    if (n > n_int) {
      // hole constants: mean of the adjacent interior values
      std::vector<double> sum(n - n_int, 0.0), cnt(n - n_int, 0.0);
      for (std::size_t k = 0; k < n_int; ++k)
        for (int nb : G.neighbours(k))
          if (nb < 0 && slot[-nb - 1] >= 0) {
            sum[slot[-nb - 1]] += x[k];
            cnt[slot[-nb - 1]] += 1;
          }
      for (std::size_t f = 0; f < sum.size(); ++f) x[n_int + f] = cnt[f] > 0 ? sum[f] / cnt[f] : 0.0;
    }
    return x;
  }

  Eigen::VectorXd from_field(const GridField& u) const {
    if (&u.grid() != &G) fail(ErrorCode::DimensionMismatch, "initial field lives on another grid");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < n_int; ++k) x[k] = u.interior()[k] - phi_int[k];
    if (n > n_int) {
      std::vector<double> sum(n - n_int, 0.0), cnt(n - n_int, 0.0);
      for (std::size_t b = 0; b < slot.size(); ++b)
        if (slot[b] >= 0) {
          sum[slot[b]] += u.boundary()[b] - phi_bd[b];
          cnt[slot[b]] += 1;
        }
      for (std::size_t f = 0; f < sum.size(); ++f) x[n_int + f] = cnt[f] > 0 ? sum[f] / cnt[f] : 0.0;
    }
    return x;
  }

  // t* with ⟨dE(t w), w⟩ = 0 (single mode)
  double nehari_t(const Eigen::VectorXd& w) const {
    const double wmax = w.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < n; ++k)
      if (w[k] < -1e-12 * wmax)
        fail(ErrorCode::NotNonnegative, "Nehari scaling needs a non-negative field");
    const double aww = form(w, w);
    if (!(aww > 0)) fail(ErrorCode::NoPositivePart, "trivial field");
    auto g = [&](double t) {
      double s = t * aww;
      for (std::size_t k = 0; k < n_int; ++k)
        if (w[k] > 0) s -= h2 * ie2p * pw(t * w[k] - s_plus[k], p) * w[k];
      return s / aww;
    };
    double lo = 1, glo = g(lo);
    for (int i = 0; glo <= 0 && i < 200; ++i) glo = g(lo *= 0.5);
    if (glo <= 0) fail(ErrorCode::NoPositivePart, "no positive bracket end for the Nehari scaling");
    double hi = lo, ghi = glo;
    while (ghi >= 0) {
      hi *= 2;
      if (hi > 1e6) fail(ErrorCode::NoPositivePart, "w never exceeds q^ε within the scaling cap");
      ghi = g(hi);
    }
    if (hi > 2 * lo) {
      lo = hi / 2;
      glo = g(lo);
    }
    auto r = toms748(g, lo, hi, glo, ghi);
    return std::abs(g(r.first)) < std::abs(g(r.second)) ? r.first : r.second;
  }

  // (t₊, t₋) zeroing ⟨dE(t₊w₊ − t₋w₋), w±⟩
  std::pair<double, double> nodal_t(const Eigen::VectorXd& w) const {
    Eigen::VectorXd wp = w.cwiseMax(0.0), wm = (-w).cwiseMax(0.0);
    const double App = form(wp, wp), Amm = form(wm, wm), c = -form(wp, wm);
    if (!(App > 0) || !(Amm > 0)) fail(ErrorCode::NoSignChange, "pair iterate lost one of its signs");
    auto gp = [&](double tp, double tm) {
      double s = tp * App + tm * c;
      for (std::size_t k = 0; k < n_int; ++k)
        if (wp[k] > 0) s -= h2 * ie2p * pw(tp * wp[k] - s_plus[k], p) * wp[k];
      return s / App;
    };
    auto gm = [&](double tp, double tm) {
      double s = tm * Amm + tp * c;
      for (std::size_t k = 0; k < n_int; ++k)
        if (wm[k] > 0) s -= h2 * ie2m * pw(tm * wm[k] + s_minus[k], p) * wm[k];
      return s / Amm;
    };
    auto solve1 = [](auto g) {
      double lo = 1, glo = g(lo);
      for (int i = 0; glo <= 0 && i < 200; ++i) glo = g(lo *= 0.5);
      if (glo <= 0) fail(ErrorCode::NoSignChange, "projection rectangle exhausted");
      double hi = lo, ghi = glo;
      while (ghi >= 0) {
        hi *= 2;
        if (hi > 1e6) fail(ErrorCode::NoSignChange, "projection rectangle exhausted");
        ghi = g(hi);
      }
      if (hi > 2 * lo) {
        lo = hi / 2;
        glo = g(lo);
      }
      auto r = toms748(g, lo, hi, glo, ghi);
      return 0.5 * (r.first + r.second);
    };
    auto tp_of = [&](double tm) { return solve1([&](double tp) { return gp(tp, tm); }); };
    double tm = solve1([&](double tm) { return gm(tp_of(tm), tm); });
    return {tp_of(tm), tm};
  }

  Eigen::VectorXd nodal_project(const Eigen::VectorXd& w) const {
    auto [tp, tm] = nodal_t(w);
    return tp * w.cwiseMax(0.0) - tm * (-w).cwiseMax(0.0);
  }

  Eigen::VectorXd project(const Eigen::VectorXd& w) const { return pair ? nodal_project(w) : nehari_t(w) * w; }

  // H(x̂, x_k) at every interior node
  std::vector<double> regular_row(Vec2 xh) const {
    std::vector<double> H(n_int);
    for (std::size_t k = 0; k < n_int; ++k) H[k] = spec.green->regular(xh, G.interior_point(k));
    return H;
  }

  // U_κ̂((x − x̂)/ε) + κ̂((1/2π) log(1/(ε ρ_κ̂)) + H(x̂, x)), odd in κ̂
  void add_hat(std::vector<double>& u, Vec2 xh, double kh, double eps, const std::vector<double>& H) const {
    auto pk = profile_for_kappa(cached_profile(p), std::abs(kh));
    const double sg = kh > 0 ? 1.0 : -1.0, ak = std::abs(kh);
    const double c = ak * kInv2Pi * std::log(1.0 / (eps * pk.rho));
    for (std::size_t k = 0; k < n_int; ++k) u[k] += sg * (pk.U(dist(G.interior_point(k), xh) / eps) + c + ak * H[k]);
  }
};

double rel_residual(const Context& c, const Eigen::VectorXd& x) {
  Eigen::VectorXd b = c.rhs(x);
  double bn = b.norm();
  return bn > 0 ? (c.S.matrix() * x - b).norm() / bn : std::numeric_limits<double>::infinity();
}

struct Iterate {
  Eigen::VectorXd x;
  int iterations = 0;
  int newton_steps = 0;
  bool converged = false;
  double theta = 0.5;
  double res = 0;
};

bool rotation_invariant(const Context& c);

// x₁∂₂u − x₂∂₁u by central differences (zero Dirichlet data)
Eigen::VectorXd rotation_mode(const Context& c, const Eigen::VectorXd& x) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(c.n);
  const double ih = 1.0 / c.G.h();
  auto val = [&](int nb) { return nb >= 0 ? x[nb] : 0.0; };
  for (std::size_t k = 0; k < c.n_int; ++k) {
    const auto& nb = c.G.neighbours(k);
    const auto& arm = c.G.arms(k);
    Vec2 p = c.G.interior_point(k);
    double ux = (val(nb[0]) - val(nb[1])) * ih / (arm[0] + arm[1]);
    double uy = (val(nb[2]) - val(nb[3])) * ih / (arm[2] + arm[3]);
    m[k] = p.x * uy - p.y * ux;
  }
  return m;
}

// Newton on A x = ω(x); returns false when the line search stalls.
// In rotation-invariant problems the step is kept orthogonal to the (nearly null) rotation mode.
bool newton_polish(const Context& c, Eigen::VectorXd& x, const SolveOptions& opt, int& steps, double& res) {
  SparseMatrix J = c.S.matrix();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  ldlt.analyzePattern(J);
  Eigen::VectorXd R = c.residual(x);
  double rn = R.norm();
  const bool deflate = rotation_invariant(c);
  for (int it = 0; it < opt.newton_max; ++it) {
    res = rel_residual(c, x);
    if (res <= opt.newton_tol) return true;
    J = c.S.matrix();
    for (std::size_t k = 0; k < c.n_int; ++k) J.coeffRef(k, k) -= c.domega(k, x[k]);
    ldlt.factorize(J);
    if (ldlt.info() != Eigen::Success) return false;
    std::vector<Eigen::VectorXd> dirs{ldlt.solve(R)};
    if (deflate) {
      Eigen::VectorXd m = rotation_mode(c, x);
      Eigen::VectorXd Jm = ldlt.solve(m);
      const double den = m.dot(Jm);
      if (m.norm() > 0 && std::abs(den) > 0) dirs.push_back(dirs[0] - (m.dot(dirs[0]) / den) * Jm);
    }
    // first acceptable step along each direction; keep the best
    bool ok = false;
    Eigen::VectorXd xb, Rb;
    double best = rn;
    for (const auto& d : dirs) {
      double a = 1;
      for (int ls = 0; ls < 12; ++ls, a *= 0.5) {
        Eigen::VectorXd xn = x - a * d;
        Eigen::VectorXd Rn = c.residual(xn);
        double nn = Rn.norm();
        if (nn < (1 - 1e-4 * a) * rn) {
          if (nn < best) {
            best = nn;
            xb = std::move(xn);
            Rb = std::move(Rn);
            ok = true;
          }
          break;
        }
      }
    }
    if (ok) {
      x = std::move(xb);
      R = std::move(Rb);
      rn = best;
    }
    ++steps;
    if (opt.progress) opt.progress(-steps, 0.0, rel_residual(c, x));
    if (!ok) {
      res = rel_residual(c, x);
      return res <= opt.residual_tol;
    }
  }
  res = rel_residual(c, x);
  return res <= opt.residual_tol;
}

Iterate iterate(const Context& c, Eigen::VectorXd x, const SolveOptions& opt) {
  Iterate out;
  out.theta = opt.theta;
  x = c.project(c.pair ? x : Eigen::VectorXd(x.cwiseMax(0.0)));
  double E = c.energy(x);
  // Newton is retried each time the Picard residual has dropped tenfold since the last attempt
  double next_newton = opt.newton_switch;
  int last_try = 0;
  for (int k = 1; k <= opt.max_iter; ++k) {
    out.iterations = k;
    Eigen::VectorXd b = c.rhs(x);
    if (b.norm() == 0) fail(ErrorCode::TrivialCollapse, "the vorticity vanished during the iteration");
    Eigen::VectorXd w = c.S.solve_raw(b);
    Eigen::VectorXd xn = (1 - out.theta) * x + out.theta * c.project(w);
    xn = c.project(xn);
    double En = c.energy(xn);
    if (En > E + 1e-12 * std::abs(E) && out.theta > opt.theta_fallback) {
      out.theta = opt.theta_fallback;
      continue;
    }
    double dE = std::abs(En - E) / std::max(std::abs(En), 1e-300);
    x = std::move(xn);
    E = En;
    out.res = rel_residual(c, x);
    if (opt.progress) opt.progress(k, E, out.res);
    if (out.res <= opt.residual_tol && dE < opt.energy_tol) {
      out.converged = true;
      break;
    }
    if (opt.newton && (out.res < next_newton || (last_try == 0 && k >= opt.picard_before_newton))) {
      next_newton = 0.1 * std::min(out.res, next_newton);
      last_try = k;
      Eigen::VectorXd xt = x;
      double res = 0;
      int steps = 0;
      bool ok = newton_polish(c, xt, opt, steps, res);
      out.newton_steps += steps;
      // only keep the polished field if it is still a vortex of the same kind
      bool alive = c.rhs(xt).norm() > 0;
      if (alive && c.pair) {
        alive = false;
        for (std::size_t i = 0; i < c.n_int; ++i)
          if (c.omega(i, xt[i]) < 0) {
            alive = true;
            break;
          }
      }
      if (ok && alive) {
        x = std::move(xt);
        out.res = res;
        out.converged = true;
        break;
      }
    }
  }
  out.res = rel_residual(c, x);
  out.x = std::move(x);
  return out;
}

SolveResult finish(const Context& c, const Iterate& it, const ProblemSpec& spec) {
  SolveResult r;
  r.u = c.to_field(it.x);
  r.energy = c.energy(it.x);
  r.pde_residual = it.res;
  r.iterations = it.iterations;
  r.newton_steps = it.newton_steps;
  r.converged = it.converged;
  r.theta = it.theta;
  r.far_field_center = c.center;
  if (!spec.pair) {
    r.nehari_residual = c.dE(it.x, it.x) / c.form(it.x, it.x);
  } else {
    Eigen::VectorXd up = it.x.cwiseMax(0.0), um = (-it.x).cwiseMax(0.0);
    r.nehari_residual = c.dE(it.x, up) / c.form(up, up);
    r.nehari_residual_minus = c.dE(it.x, um) / c.form(um, um);
  }
  return r;
}

Eigen::VectorXd single_hat_raw(const Context& c, Vec2 xh, HatFunction* info) {
  const ProblemSpec& s = c.spec;
  const RadialProfile& prof = cached_profile(s.p);
  const double rho = profile_for_kappa(prof, s.kappa).rho;
  const double Q = s.q_eps(xh);
  const double D = kInv2Pi * std::log(1.0 / (s.eps * rho)) + s.green->robin(xh);
  const auto H = c.regular_row(xh);

  auto build = [&](double kh) {
    std::vector<double> u(c.n_int, 0.0);
    c.add_hat(u, xh, kh, s.eps, H);
    return c.from_interior(u);
  };
  auto g = [&](double sigma) {
    Eigen::VectorXd x = build((Q + sigma) / D);
    return c.dE(x, x) / c.form(x, x);
  };

  HatFunction hf;
  Eigen::VectorXd x;
  bool root = false;
  if (D > 0 && Q > 0) {
    try {
      double g0 = g(0);
      double a = 0, b = 0, ga = g0, gb = g0;
      const double step = 0.05 * Q;
      if (g0 > 0) {
        for (int i = 0; gb > 0 && i < 40; ++i) gb = g(b = step * std::pow(2.0, i));
        if (gb > 0) throw Error(ErrorCode::NoSignChange, "σ bracket");
      } else if (g0 < 0) {
        for (int i = 1; ga < 0 && i < 40; ++i) ga = g(a = -Q * (1 - std::pow(2.0, -i)));
        if (ga < 0) throw Error(ErrorCode::NoSignChange, "σ bracket");
      }
      double sigma = 0;
      if (g0 != 0) {
        auto r = toms748(g, a, b, ga, gb);
        sigma = std::abs(g(r.first)) < std::abs(g(r.second)) ? r.first : r.second;
      }
      hf.sigma = sigma;
      hf.kappa_hat = (Q + sigma) / D;
      x = build(hf.kappa_hat);
      root = true;
    } catch (const Error&) {
      root = false;
    }
  }
  if (!root) {
    hf.kappa_hat = D > 0 && Q > 0 ? Q / D : s.kappa;
    x = build(hf.kappa_hat);
    x = c.nehari_t(x.cwiseMax(0.0)) * x.cwiseMax(0.0);
  }
  hf.sigma_root = root;
  hf.rho = profile_for_kappa(prof, hf.kappa_hat).rho;
  if (info) *info = hf;
  return x;
}

Eigen::VectorXd pair_hat_raw(const Context& c, Vec2 xp, Vec2 xm) {
  const ProblemSpec& s = c.spec;
  if (xp == xm) fail(ErrorCode::CoincidentPoints, "pair centres coincide");
  const RadialProfile& prof = cached_profile(s.p);
  const double rp = profile_for_kappa(prof, s.kappa).rho, rm = profile_for_kappa(prof, -s.kappa_minus).rho;
  const double Gpm = s.green->green(xp, xm);
  const double Dp = kInv2Pi * std::log(1.0 / (s.eps * rp)) + s.green->robin(xp);
  const double Dm = kInv2Pi * std::log(1.0 / (s.eps_minus * rm)) + s.green->robin(xm);
  double kp = (s.q_eps(xp) - s.kappa_minus * Gpm) / Dp;
  double km = (s.q_eps_minus(xm) - s.kappa * Gpm) / Dm;
  if (!(Dp > 0 && Dm > 0 && kp > 0 && km < 0)) {
    kp = s.kappa;
    km = s.kappa_minus;
  }
  std::vector<double> u(c.n_int, 0.0);
  c.add_hat(u, xp, kp, s.eps, c.regular_row(xp));
  c.add_hat(u, xm, km, s.eps_minus, c.regular_row(xm));
  return c.nodal_project(c.from_interior(u));
}

bool rotation_invariant(const Context& c) {
  const Domain& d = c.G.domain();
  return c.spec.green->mode() == GreenMode::Analytic && d.kind() == DomainKind::Disc && d.anchor() == Vec2{} &&
         c.spec.background.radial() && c.S.floating().empty();
}

// centre minimising the energy of the hat function; 1D along the ray through x0 for rotation-invariant problems
Vec2 refine_center(const Context& c, Vec2 x0) {
  const ProblemSpec& s = c.spec;
  const Domain& d = c.G.domain();
  const bool radial = rotation_invariant(c);
  const double step = std::max(0.5 * s.eps * profile_for_kappa(cached_profile(s.p), s.kappa).rho, 2 * c.G.h());
  auto value = [&](Vec2 x) {
    if (!s.green->admissible(x) || d.distance_to_boundary(x) < 2 * c.G.h()) return -std::numeric_limits<double>::infinity();
    try {
      return -c.energy(single_hat_raw(c, x, nullptr));
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double tol = 0.05 * c.G.h();
  if (radial) {
    Vec2 dir = norm(x0) > 1e-12 ? x0 / norm(x0) : Vec2{1, 0};
    auto r = nelder_mead_maximize([&](const std::vector<double>& v) { return value(v[0] * dir); }, {norm(x0)}, {step},
                                  tol, 1e-14, 400);
    return std::isfinite(r.value) ? r.x[0] * dir : x0;
  }
  auto r = nelder_mead_maximize([&](const std::vector<double>& v) { return value({v[0], v[1]}); }, {x0.x, x0.y},
                                {step, step}, tol, 1e-14, 400);
  return std::isfinite(r.value) ? Vec2{r.x[0], r.x[1]} : x0;
}

// same for the pair; x₋ = −x₊ kept for symmetric pairs in rotation-invariant problems
std::pair<Vec2, Vec2> refine_pair_centers(const Context& c, Vec2 xp, Vec2 xm) {
  const ProblemSpec& s = c.spec;
  const Domain& d = c.G.domain();
  const double gap = 2 * c.G.h();
  auto value = [&](Vec2 a, Vec2 b) {
    for (Vec2 x : {a, b})
      if (!s.green->admissible(x) || d.distance_to_boundary(x) < gap) return -std::numeric_limits<double>::infinity();
    if (dist(a, b) < gap) return -std::numeric_limits<double>::infinity();
    try {
      return -c.energy(pair_hat_raw(c, a, b));
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const auto& prof = cached_profile(s.p);
  const double step = std::max(0.5 * std::min(s.eps * profile_for_kappa(prof, s.kappa).rho,
                                               s.eps_minus * profile_for_kappa(prof, -s.kappa_minus).rho),
                               2 * c.G.h());
  const double tol = 0.05 * c.G.h();
  const bool symmetric = rotation_invariant(c) && s.kappa_minus == -s.kappa && s.eps_minus == s.eps &&
                         norm(xp + xm) < 1e-6 * std::max(1.0, norm(xp));
  if (symmetric && norm(xp) > 1e-12) {
    // rotated onto the x₁ axis: the reflection x₂ → −x₂ then pins the angle on the lattice
    const Vec2 dir{1, 0};
    auto r = nelder_mead_maximize([&](const std::vector<double>& v) { return value(v[0] * dir, -v[0] * dir); },
                                  {norm(xp)}, {step}, tol, 1e-14, 400);
    if (std::isfinite(r.value)) return {r.x[0] * dir, -r.x[0] * dir};
    return {xp, xm};
  }
  auto r = nelder_mead_maximize(
      [&](const std::vector<double>& v) { return value({v[0], v[1]}, {v[2], v[3]}); }, {xp.x, xp.y, xm.x, xm.y},
      {step, step, step, step}, tol, 1e-14, 1500);
  if (std::isfinite(r.value)) return {Vec2{r.x[0], r.x[1]}, Vec2{r.x[2], r.x[3]}};
  return {xp, xm};
}

Vec2 default_center(const ProblemSpec& spec) {
  RouthConfig cfg;
  cfg.mode = RouthMode::Single;
  cfg.kappa = spec.kappa;
  cfg.green = spec.green;
  cfg.background = spec.background;
  return routh_maximize(cfg).points.at(0);
}

}  // namespace

double ProblemSpec::q_eps(Vec2 x) const { return background(x) + kappa * kInv2Pi * std::log(1.0 / eps); }
double ProblemSpec::q_eps_minus(Vec2 x) const {
  return background(x) + kappa_minus * kInv2Pi * std::log(1.0 / eps_minus);
}

void ProblemSpec::validate() const {
  if (!solver || !green) fail(ErrorCode::InvalidSpec, "problem needs a solver and a Green evaluator");
  if (!(p > 1)) fail(ErrorCode::UnsupportedExponent, "exponent must exceed 1");
  if (!(eps > 0)) fail(ErrorCode::InvalidSpec, "ε must be positive");
  if (!(kappa > 0)) fail(ErrorCode::NonPositiveKappa, "κ must be positive");
  if (pair) {
    if (!(kappa_minus < 0)) fail(ErrorCode::InvalidSpec, "pair mode needs κ₋ < 0");
    if (!(eps_minus > 0)) fail(ErrorCode::InvalidSpec, "ε₋ must be positive");
  }
  const Grid& G = grid();
  for (std::size_t k = 0; k < G.interior_count(); ++k) {
    Vec2 x = G.interior_point(k);
    if (q_eps(x) < -1e-12) fail(ErrorCode::InvalidSpec, "q^ε is negative somewhere; κ too small for this ε and q");
    if (pair && q_eps_minus(x) > 1e-12) fail(ErrorCode::InvalidSpec, "q₋^ε is positive somewhere");
  }
  const RadialProfile& prof = cached_profile(p);
  const double h = G.h();
  if (eps * profile_for_kappa(prof, kappa).rho < 6 * h)
    fail(ErrorCode::GridTooCoarseForCore, "vortex core ερ_κ is resolved by fewer than 6 mesh widths");
  if (pair && eps_minus * profile_for_kappa(prof, -kappa_minus).rho < 6 * h)
    fail(ErrorCode::GridTooCoarseForCore, "negative vortex core is resolved by fewer than 6 mesh widths");
}

NehariScale nehari_scale(const GridField& w, const ProblemSpec& spec) {
  if (spec.pair) fail(ErrorCode::InvalidSpec, "use the nodal projection in pair mode");
  Context c(spec, spec.far_field_center);
  Eigen::VectorXd x = c.from_field(w);
  NehariScale out;
  out.t = c.nehari_t(x);
  x *= out.t;
  out.field = c.to_field(x);
  out.residual = c.dE(x, x) / c.form(x, x);
  return out;
}

HatFunction hat_function(const ProblemSpec& spec, Vec2 xhat) {
  spec.validate();
  Context c(spec, xhat);
  HatFunction hf;
  Eigen::VectorXd x = single_hat_raw(c, xhat, &hf);
  hf.u = c.to_field(x);
  return hf;
}

GridField pair_hat_function(const ProblemSpec& spec, Vec2 xp, Vec2 xm) {
  spec.validate();
  if (!spec.pair) fail(ErrorCode::InvalidSpec, "pair hat needs a pair problem");
  Context c(spec, std::nullopt);
  return c.to_field(pair_hat_raw(c, xp, xm));
}

double energy(const GridField& u, const ProblemSpec& spec) {
  Context c(spec, spec.far_field_center);
  return c.energy(c.from_field(u));
}

SolveResult solve_single_at(const ProblemSpec& spec, Vec2 center, const SolveOptions& opt) {
  spec.validate();
  if (spec.pair) fail(ErrorCode::InvalidSpec, "single solver called with a pair problem");
  Context c0(spec, center);
  if (opt.refine_center) center = refine_center(c0, center);
  Context c(spec, center);
  Eigen::VectorXd x0 = single_hat_raw(c, center, nullptr);
  const double E0 = c.energy(x0);
  Iterate it = iterate(c, x0, opt);
  SolveResult r = finish(c, it, spec);
  r.centers = {center};
  r.init_energy = E0;
  ProblemSpec sc = spec;
  sc.far_field_center = c.center;
  if (diagnostics(r.u, sc, 1).empty()) fail(ErrorCode::TrivialCollapse, "no vorticity left");
  if (!r.converged && it.iterations >= opt.max_iter) fail(ErrorCode::NoConvergence, "iteration cap reached");
  return r;
}

SolveResult solve_single(const ProblemSpec& spec, const std::optional<GridField>& init, const SolveOptions& opt) {
  spec.validate();
  if (!init) return solve_single_at(spec, default_center(spec), opt);
  if (spec.pair) fail(ErrorCode::InvalidSpec, "single solver called with a pair problem");
  Context c(spec, spec.far_field_center.value_or(Vec2{}));
  Eigen::VectorXd x0 = c.from_field(*init);
  const double E0 = c.energy(c.project(x0.cwiseMax(0.0)));
  Iterate it = iterate(c, x0.cwiseMax(0.0), opt);
  SolveResult r = finish(c, it, spec);
  r.init_energy = E0;
  if (!r.converged && it.iterations >= opt.max_iter) fail(ErrorCode::NoConvergence, "iteration cap reached");
  return r;
}

SolveResult solve_pair_at(const ProblemSpec& spec, Vec2 xp, Vec2 xm, const SolveOptions& opt) {
  spec.validate();
  if (!spec.pair) fail(ErrorCode::InvalidSpec, "pair solver called with a single-vortex problem");
  Context c(spec, std::nullopt);
  if (opt.refine_center) std::tie(xp, xm) = refine_pair_centers(c, xp, xm);
  Eigen::VectorXd x0 = pair_hat_raw(c, xp, xm);
  const double E0 = c.energy(x0);
  Iterate it = iterate(c, x0, opt);
  SolveResult r = finish(c, it, spec);
  r.centers = {xp, xm};
  r.init_energy = E0;
  if (!r.converged && it.iterations >= opt.max_iter) fail(ErrorCode::NoConvergence, "iteration cap reached");
  return r;
}

SolveResult solve_pair(const ProblemSpec& spec, const std::optional<GridField>& init, const SolveOptions& opt) {
  spec.validate();
  if (!spec.pair) fail(ErrorCode::InvalidSpec, "pair solver called with a single-vortex problem");
  if (!init) {
    RouthConfig cfg;
    cfg.mode = RouthMode::Pair;
    cfg.kappa = spec.kappa;
    cfg.kappa_minus = spec.kappa_minus;
    cfg.green = spec.green;
    cfg.background = spec.background;
    auto m = routh_maximize(cfg);
    return solve_pair_at(spec, m.points.at(0), m.points.at(1), opt);
  }
  Context c(spec, std::nullopt);
  Eigen::VectorXd x0 = c.from_field(*init);
  const double E0 = c.energy(c.nodal_project(x0));
  Iterate it = iterate(c, x0, opt);
  SolveResult r = finish(c, it, spec);
  r.init_energy = E0;
  if (!r.converged && it.iterations >= opt.max_iter) fail(ErrorCode::NoConvergence, "iteration cap reached");
  return r;
}

Vec2 VortexDiagnostics::centroid() const {
  if (empty()) fail(ErrorCode::EmptyVorticity, "centre of vorticity undefined: no vorticity");
  return x_eps;
}

VortexDiagnostics diagnostics(const GridField& u, const ProblemSpec& spec, int sign) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidSpec, "sign must be ±1");
  if (sign < 0 && !spec.pair) fail(ErrorCode::InvalidSpec, "negative part needs a pair problem");
  const Grid& G = u.grid();
  const double h2 = G.h() * G.h();
  const double ie2 = sign > 0 ? 1.0 / (spec.eps * spec.eps) : 1.0 / (spec.eps_minus * spec.eps_minus);
  auto qs = [&](Vec2 x) { return sign > 0 ? spec.q_eps(x) : spec.q_eps_minus(x); };
  const std::size_t n = G.interior_count();
  auto bn = G.boundary_nodes();

  // level function: > 0 exactly on A
  std::vector<double> lv(n), lb(bn.size());
  for (std::size_t k = 0; k < n; ++k) lv[k] = sign * (u.interior()[k] - qs(G.interior_point(k)));
  for (std::size_t b = 0; b < bn.size(); ++b) {
    double q;
    try {
      q = qs(bn[b].x);
    } catch (const Error&) {
      q = qs(bn[b].foot);
    }
    lb[b] = sign * (u.boundary()[b] - q);
  }

  VortexDiagnostics d;
  d.sign = sign;
  d.omega = GridField(u.grid_ptr());
  Vec2 m{};
  for (std::size_t k = 0; k < n; ++k) {
    if (lv[k] <= 0) continue;
    ++d.nodes;
    double w = sign * ie2 * std::pow(lv[k], spec.p);
    d.omega.interior()[k] = w;
    d.kappa_eps += h2 * w;
    m += h2 * w * G.interior_point(k);
  }
  try {
    d.energy = energy(u, spec);
  } catch (const Error&) {
    d.energy = std::numeric_limits<double>::quiet_NaN();
  }
  if (d.nodes == 0 || d.kappa_eps == 0) return d;
  d.x_eps = m / d.kappa_eps;

  // crossings of the level set along edges leaving A
  std::vector<Vec2> cross;
  for (std::size_t k = 0; k < n; ++k) {
    if (lv[k] <= 0) continue;
    Vec2 xk = G.interior_point(k);
    for (int nb : G.neighbours(k)) {
      double l2;
      Vec2 x2;
      if (nb >= 0) {
        l2 = lv[nb];
        x2 = G.interior_point(nb);
      } else {
        l2 = lb[-nb - 1];
        x2 = bn[-nb - 1].x;
      }
      if (l2 > 0) continue;
      double t = lv[k] / (lv[k] - l2);
      cross.push_back(xk + t * (x2 - xk));
    }
  }
  d.r_bar = std::numeric_limits<double>::infinity();
  for (Vec2 c : cross) {
    double r = dist(c, d.x_eps);
    d.r_bar = std::min(d.r_bar, r);
    d.r_ring = std::max(d.r_ring, r);
  }
  if (cross.empty()) d.r_bar = 0;
  for (std::size_t i = 0; i < cross.size(); ++i)
    for (std::size_t j = i + 1; j < cross.size(); ++j) d.diameter = std::max(d.diameter, dist(cross[i], cross[j]));

  // 4-connected components of A
  std::vector<int> label(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    if (lv[k] <= 0 || label[k] >= 0) continue;
    std::deque<std::size_t> queue{k};
    label[k] = d.components;
    while (!queue.empty()) {
      std::size_t a = queue.front();
      queue.pop_front();
      for (int nb : G.neighbours(a))
        if (nb >= 0 && lv[nb] > 0 && label[nb] < 0) {
          label[nb] = d.components;
          queue.push_back(nb);
        }
    }
    ++d.components;
  }
  return d;
}

double aitken(std::span<const double> s) {
  if (s.size() < 3) fail(ErrorCode::InsufficientPoints, "Aitken extrapolation needs three terms");
  const double a = s[s.size() - 3], b = s[s.size() - 2], c = s[s.size() - 1];
  const double den = (c - b) - (b - a);
  if (den == 0) return c;
  return c - (c - b) * (c - b) / den;
}

SweepReport epsilon_sweep(const ProblemSpec& tmpl, std::span<const double> eps_list, const SolveOptions& opt) {
  if (eps_list.size() < 3) fail(ErrorCode::InsufficientPoints, "a sweep needs at least three ε values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) fail(ErrorCode::InvalidSpec, "ε values must decrease");
  if (tmpl.pair) fail(ErrorCode::InvalidSpec, "sweeps run in single mode");

  SweepReport rep;
  rep.kappa = tmpl.kappa;
  const RadialProfile& prof = cached_profile(tmpl.p);
  auto pk = profile_for_kappa(prof, tmpl.kappa);
  rep.rho_kappa = pk.rho;
  rep.limit_constant = limit_constant(pk);

  RouthConfig cfg;
  cfg.mode = RouthMode::Single;
  cfg.kappa = tmpl.kappa;
  cfg.green = tmpl.green;
  cfg.background = tmpl.background;
  auto mx = routh_maximize(cfg);
  rep.x_star = mx.points.at(0);
  rep.W_star = mx.value;
  rep.c2_predicted = kTwoPi * (tmpl.background(rep.x_star) - tmpl.kappa * tmpl.green->robin(rep.x_star) -
                               tmpl.kappa * kInv2Pi * std::log(1.0 / pk.rho));
  rep.energy_limit_predicted = -rep.W_star + rep.limit_constant;

  Vec2 center = rep.x_star;
  for (double eps : eps_list) {
    ProblemSpec s = tmpl;
    s.eps = eps;
    // warm start: hat function at the previous centre of vorticity
    SolveResult r = solve_single_at(s, center, opt);
    s.far_field_center = r.far_field_center;
    VortexDiagnostics d = diagnostics(r.u, s, 1);
    SweepPoint pt;
    pt.eps = eps;
    pt.kappa_eps = d.kappa_eps;
    pt.x_eps = d.centroid();
    pt.energy = r.energy;
    pt.energy_shifted = r.energy - tmpl.kappa * tmpl.kappa / (4 * kPi) * std::log(1.0 / eps);
    pt.hat_energy = r.init_energy;
    pt.diam_ratio = d.diameter / (2 * eps);
    pt.r_bar = d.r_bar;
    pt.r_ring = d.r_ring;
    pt.components = d.components;
    pt.iterations = r.iterations;
    pt.converged = r.converged;
    pt.pde_residual = r.pde_residual;
    pt.nehari_residual = r.nehari_residual;
    rep.points.push_back(pt);
    center = pt.x_eps;
  }

  // least squares κ^ε = c₁ + c₂ ξ, ξ = 1/log(1/ε)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(rep.points.size());
  for (const auto& pt : rep.points) {
    double xi = 1.0 / std::log(1.0 / pt.eps);
    sx += xi;
    sy += pt.kappa_eps;
    sxx += xi * xi;
    sxy += xi * pt.kappa_eps;
  }
  rep.c2 = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.c1 = (sy - rep.c2 * sx) / m;
  double rss = 0;
  for (const auto& pt : rep.points) {
    double e = pt.kappa_eps - rep.c1 - rep.c2 / std::log(1.0 / pt.eps);
    rss += e * e;
  }
  rep.fit_residual = std::sqrt(rss / m);
  std::vector<double> es;
  for (const auto& pt : rep.points) es.push_back(pt.energy_shifted);
  rep.energy_limit = aitken(es);
  return rep;
}

}  // namespace vortex
