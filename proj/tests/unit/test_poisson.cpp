#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "vortex/error.hpp"
#include "vortex/green.hpp"
#include "vortex/poisson.hpp"

using namespace vortex;

TEST_CASE("linear data is reproduced exactly") {
  for (auto method : {SolverMethod::Direct, SolverMethod::Pcg}) {
    auto g = Grid::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 32);
    PoissonSolver ps(g, method);
    std::vector<double> rhs(g->interior_count(), 0.0), bd(g->boundary_count());
    for (std::size_t b = 0; b < bd.size(); ++b) bd[b] = g->boundary_nodes()[b].x.x;
    GridField u = ps.solve(rhs, bd);
    double err = 0;
    for (std::size_t k = 0; k < g->interior_count(); ++k)
      err = std::max(err, std::abs(u.interior()[k] - g->interior_point(k).x));
    CHECK(err < (method == SolverMethod::Direct ? 1e-12 : 1e-9));
  }
}

TEST_CASE("unit load on the disc: u(0) close to 1/4") {
  auto g = Grid::build(Domain::disc(1.0), 0.02);
  PoissonSolver ps(g);
  std::vector<double> rhs(g->interior_count(), 1.0);
  GridField u = ps.solve(rhs);
  CHECK(std::abs(u.sample({0, 0}) - 0.25) < 2e-3);
  // against (1 − r²)/4 everywhere
  double err = 0;
  for (std::size_t k = 0; k < g->interior_count(); ++k)
    err = std::max(err, std::abs(u.interior()[k] - (1 - norm2(g->interior_point(k))) / 4));
  CHECK(err < 5e-3);
}

TEST_CASE("discrete delta reproduces the numeric Green function") {
  auto g = Grid::build(Domain::disc(1.0), 1.0 / 32);
  auto ps = std::make_shared<PoissonSolver>(g);
  auto ge = GreenEvaluator::numeric(ps);
  auto [i, j] = g->nearest_node({0.3, -0.2});
  int k = g->interior_id(i, j);
  REQUIRE(k >= 0);
  std::vector<double> rhs(g->interior_count(), 0.0);
  rhs[k] = 1.0 / (g->h() * g->h());
  GridField u = ps->solve(rhs);
  auto gf = ge->source_field(std::size_t(k));
  double err = 0;
  for (std::size_t n = 0; n < g->interior_count(); ++n) err = std::max(err, std::abs(u.interior()[n] - gf->interior()[n]));
  CHECK(err < 1e-12);
}

TEST_CASE("Dirichlet energy of simple fields") {
  auto g = Grid::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 16);
  GridField x1 = GridField::from_function(g, [](Vec2 p) { return p.x; });
  CHECK(dirichlet_energy(x1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dirichlet_energy(GridField(g)) == 0.0);
}

TEST_CASE("annulus capacitor energy") {
  const double R = std::exp(1.0);
  auto g = Grid::build(Domain::annulus(1.0, R), 0.01);
  GridField u = GridField::from_function(g, [R](Vec2 p) { return std::log(R / norm(p)) / std::log(R); });
  CHECK(dirichlet_energy(u) == doctest::Approx(kTwoPi).epsilon(0.03));
}

TEST_CASE("dirichlet_form is the operator energy") {
  auto g = Grid::build(Domain::disc(1.0), 1.0 / 24);
  PoissonSolver ps(g);
  GridField u = GridField::from_function(g, [](Vec2 p) { return (1 - norm2(p)) * (1 + p.x); });
  GridField v = GridField::from_function(g, [](Vec2 p) { return std::sin(p.y) * (1 - norm2(p)); });
  for (auto* f : {&u, &v}) std::fill(f->boundary().begin(), f->boundary().end(), 0.0);
  Eigen::Map<const Eigen::VectorXd> uu(u.interior().data(), long(u.interior().size()));
  Eigen::Map<const Eigen::VectorXd> vv(v.interior().data(), long(v.interior().size()));
  const auto& A = ps.matrix();
  double h2 = g->h() * g->h();
  CHECK(dirichlet_form(u, v) == doctest::Approx(h2 * uu.dot(A * vv)).epsilon(1e-12));
}

TEST_CASE("floating hole: zero flux and constant boundary value") {
  auto g = Grid::build(Domain::annulus(0.4, 1.0), 1.0 / 64);
  PoissonSolver ps(g, SolverMethod::Direct, {1});
  std::vector<double> rhs(g->interior_count(), 1.0);
  GridField u = ps.solve(rhs);
  CHECK(std::abs(component_flux(u, 1)) < 1e-9);
  auto fv = ps.floating_values(u);
  REQUIRE(fv.size() == 1);
  for (std::size_t b = 0; b < g->boundary_count(); ++b)
    if (g->boundary_nodes()[b].component == 1) CHECK(u.boundary()[b] == doctest::Approx(fv[0]));
  CHECK(ps.last_relative_residual() < 1e-10);
}

TEST_CASE("second-order convergence on the unit square") {
  auto err_at = [](double h) {
    auto g = Grid::build(Domain::rectangle(0, 1, 0, 1), h);
    PoissonSolver ps(g);
    std::vector<double> rhs(g->interior_count());
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      Vec2 p = g->interior_point(k);
      rhs[k] = 2 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y);
    }
    GridField u = ps.solve(rhs);
    double e = 0;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      Vec2 p = g->interior_point(k);
      e = std::max(e, std::abs(u.interior()[k] - std::sin(kPi * p.x) * std::sin(kPi * p.y)));
    }
    return e;
  };
  double ratio = err_at(1.0 / 32) / err_at(1.0 / 64);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("discrete Green symmetry and maximum principle") {
  auto g = Grid::build(Domain::annulus(0.3, 1.0), 1.0 / 32);
  for (auto method : {SolverMethod::Direct, SolverMethod::Pcg}) {
    PoissonSolver ps(g, method);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, g->interior_count() - 1);
    for (int t = 0; t < 5; ++t) {
      std::size_t i = pick(rng), j = pick(rng);
      std::vector<double> ei(g->interior_count(), 0.0), ej = ei;
      ei[i] = 1;
      ej[j] = 1;
      GridField ui = ps.solve(ei), uj = ps.solve(ej);
      double a = ui.interior()[j], b = uj.interior()[i];
      // relative to the size of the response (the iterative solve stops at 1e-10 of that)
      CHECK(std::abs(a - b) <= 1e-8 * std::max(ui.max_interior(), uj.max_interior()));
    }
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> rhs(g->interior_count()), bd(g->boundary_count());
    for (auto& v : rhs) v = U(rng);
    for (auto& v : bd) v = U(rng);
    // a few zeros so the bound is tight somewhere
    for (std::size_t k = 0; k < rhs.size(); k += 3) rhs[k] = 0;
    CHECK(ps.solve(rhs, bd).min_interior() >= 0.0);
  }
}
