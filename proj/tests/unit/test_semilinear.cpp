#include "doctest.h"

#include <cmath>
#include <memory>

#include "vortex/error.hpp"
#include "vortex/radial_profile.hpp"
#include "vortex/semilinear.hpp"

using namespace vortex;

namespace {

ProblemSpec disc_problem(double R, double h, double eps, double kappa = kTwoPi) {
  Domain d = Domain::disc(R);
  ProblemSpec s;
  s.solver = std::make_shared<PoissonSolver>(Grid::build(d, h));
  s.green = GreenEvaluator::analytic(d);
  s.p = 3;
  s.kappa = kappa;
  s.eps = eps;
  return s;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("Nehari scaling of a field below the threshold") {
  auto s = disc_problem(1.0, 1.0 / 64, 0.1);
  GridField w = GridField::from_function(s.solver->grid_ptr(), [](Vec2 x) { return 1e-9 * (1 - norm2(x)); });
  CHECK(code_of([&] { nehari_scale(w, s); }) == ErrorCode::NoPositivePart);
  GridField neg = GridField::from_function(s.solver->grid_ptr(), [](Vec2 x) { return x.x; });
  CHECK(code_of([&] { nehari_scale(neg, s); }) == ErrorCode::NotNonnegative);
}

TEST_CASE("the unscaled hat function is close to the Nehari manifold") {
  // unit disc, q = 0, x̂ = 0 so H(x̂, ·) = 0; κ̂ makes the hat meet q^ε at its core edge
  const double eps = 1e-3, kappa = kTwoPi;
  Domain d = Domain::disc(1.0);
  ProblemSpec s;
  s.solver = std::make_shared<PoissonSolver>(Grid::build(d, 1.0 / 1024), SolverMethod::Pcg);
  s.green = GreenEvaluator::analytic(d);
  s.p = 3;
  s.kappa = kappa;
  s.eps = eps;
  auto prof = solve_unit_profile(3.0);
  const double rho = profile_for_kappa(prof, kappa).rho;
  const double kh = kappa * std::log(1 / eps) / std::log(1 / (eps * rho));
  auto pk = profile_for_kappa(prof, kh);
  GridField w = GridField::from_function(s.solver->grid_ptr(), [&](Vec2 x) {
    double r = norm(x) / eps;
    double core = r < pk.rho ? pk.U(r) : kh / kTwoPi * std::log(pk.rho / r);
    return std::max(0.0, core + kh * std::log(1 / (eps * pk.rho)) / kTwoPi);
  });
  std::fill(w.boundary().begin(), w.boundary().end(), 0.0);
  auto ns = nehari_scale(w, s);
  CHECK(std::abs(ns.t - 1) < 0.2);
  CHECK(std::abs(ns.residual) < 1e-10);
}

TEST_CASE("single vortex in the unit disc") {
  auto s = disc_problem(1.0, 1.0 / 256, 0.05);
  auto r = solve_single(s);
  CHECK(r.converged);
  CHECK(r.u.min_interior() >= 0.0);
  for (double b : r.u.boundary()) CHECK(b == 0.0);
  auto d = diagnostics(r.u, s);
  CHECK(d.components == 1);
  CHECK(norm(d.centroid()) < 2 * s.grid().h());
  CHECK(r.pde_residual < 1e-6);
  CHECK(std::abs(r.nehari_residual) < 1e-8);
  CHECK(energy(r.u, s) == doctest::Approx(r.energy).epsilon(1e-12));
  // Nehari identity ∫|∇u|² = ε⁻² ∫ f(u − q^ε) u, by direct lattice sums
  const double h2 = s.grid().h() * s.grid().h();
  double lhs = dirichlet_form(r.u, r.u), rhs = 0;
  for (std::size_t k = 0; k < s.grid().interior_count(); ++k) {
    double u = r.u.interior()[k], t = u - s.q_eps(s.grid().interior_point(k));
    if (t > 0) rhs += h2 * std::pow(t, s.p) * u / (s.eps * s.eps);
  }
  CHECK(std::abs(lhs - rhs) < 1e-8 * lhs);
  // the hat function it started from is on the Nehari manifold too, with larger energy
  CHECK(r.energy <= r.init_energy);
}

TEST_CASE("contract violations") {
  SUBCASE("q^eps negative") {
    auto s = disc_problem(1.0, 1.0 / 64, 0.1);
    s.background = BackgroundField::custom([](Vec2) { return -10.0; });
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  }
  SUBCASE("pair with two positive strengths") {
    auto s = disc_problem(1.0, 1.0 / 64, 0.1);
    s.pair = true;
    s.kappa_minus = kTwoPi;
    s.eps_minus = 0.1;
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  }
  SUBCASE("core under-resolved") {
    auto s = disc_problem(1.0, 0.05, 0.01);
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::GridTooCoarseForCore);
  }
}

TEST_CASE("diagnostics of synthetic fields") {
  auto s = disc_problem(1.0, 1.0 / 128, 0.05);
  const double qe = s.q_eps({0, 0});
  SUBCASE("no vorticity") {
    auto d = diagnostics(GridField(s.solver->grid_ptr()), s);
    CHECK(d.kappa_eps == 0.0);
    CHECK(d.nodes == 0);
    CHECK(d.empty());
    CHECK(code_of([&] { d.centroid(); }) == ErrorCode::EmptyVorticity);
  }
  SUBCASE("two disjoint bumps") {
    GridField u = GridField::from_function(s.solver->grid_ptr(), [&](Vec2 x) {
      return qe + std::max(0.0, 0.1 - dist(x, {0.4, 0})) + std::max(0.0, 0.1 - dist(x, {-0.4, 0}));
    });
    auto d = diagnostics(u, s);
    CHECK(d.components == 2);
    CHECK(norm(d.centroid()) < 1e-12);
  }
  SUBCASE("hat function core") {
    Vec2 xh{0.2, 0.1};
    auto hf = hat_function(s, xh);
    auto d = diagnostics(hf.u, s);
    CHECK(dist(d.centroid(), xh) < s.grid().h());
    CHECK(d.r_ring < 4 * s.eps);
    CHECK(d.components == 1);
    // the hat's vorticity is the profile's, κ̂ ≈ κ
    CHECK(d.kappa_eps == doctest::Approx(hf.kappa_hat).epsilon(0.1));
  }
}

TEST_CASE("pair solver on a coarse grid") {
  auto s = disc_problem(1.0, 1.0 / 128, 0.1);
  s.pair = true;
  s.kappa_minus = -kTwoPi;
  s.eps_minus = 0.1;
  auto r = solve_pair(s);
  CHECK(r.converged);
  CHECK(std::abs(r.nehari_residual) < 1e-8);
  CHECK(std::abs(r.nehari_residual_minus) < 1e-8);
  auto dp = diagnostics(r.u, s, 1), dm = diagnostics(r.u, s, -1);
  // mirror image x ↦ −x maps the positive vortex onto the negative one
  CHECK(dist(dp.centroid(), -dm.centroid()) < 2 * s.grid().h());
  CHECK(dp.kappa_eps == doctest::Approx(-dm.kappa_eps).epsilon(1e-6));

  // x ↦ −x with u ↦ −u maps the problem to itself; residuals must not notice
  const auto& g = s.grid();
  GridField v(s.solver->grid_ptr());
  for (std::size_t k = 0; k < g.interior_count(); ++k) {
    auto [i, j] = g.nearest_node(-g.interior_point(k));
    int m = g.interior_id(i, j);
    REQUIRE(m >= 0);
    v.interior()[k] = -r.u.interior()[std::size_t(m)];
  }
  for (double b : r.u.boundary()) REQUIRE(b == 0.0);
  auto relres = [&](const GridField& u) {
    auto lap = neg_laplacian(u);
    double rr = 0, ww = 0;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
      Vec2 x = g.interior_point(k);
      double tp = u.interior()[k] - s.q_eps(x), tm = s.q_eps_minus(x) - u.interior()[k];
      double w = (tp > 0 ? std::pow(tp, s.p) / (s.eps * s.eps) : 0) - (tm > 0 ? std::pow(tm, s.p) / (s.eps_minus * s.eps_minus) : 0);
      rr += (lap[k] - w) * (lap[k] - w);
      ww += w * w;
    }
    return std::sqrt(rr / ww);
  };
  double r0 = relres(r.u), r1 = relres(v);
  CHECK(r0 < 1e-6);
  CHECK(std::abs(r1 - r0) < 1e-12);
}

TEST_CASE("Aitken extrapolation is exact on geometric sequences") {
  std::vector<double> s{2 + 0.5, 2 + 0.25, 2 + 0.125};
  CHECK(aitken(s) == doctest::Approx(2.0).epsilon(1e-14));
  std::vector<double> two{1, 2};
  CHECK_THROWS_AS(aitken(two), Error);
}
