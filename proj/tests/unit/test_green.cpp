#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "vortex/error.hpp"
#include "vortex/green.hpp"

using namespace vortex;

namespace {

// method-of-images oracles, written out independently of the library kernels
double disc_green(Vec2 x, Vec2 y) {
  double ny = norm(y);
  if (ny < 1e-14) return std::log(1 / norm(x)) / kTwoPi;
  Vec2 ys = y / (ny * ny);
  return std::log(ny * dist(x, ys) / dist(x, y)) / kTwoPi;
}

double turkington_green(Vec2 x, Vec2 y) {
  Vec2 yb{-y.x, y.y};
  Vec2 ys = y / norm2(y), ybs = yb / norm2(yb);
  return std::log(norm2(x - ys) * norm2(x - yb) / (norm2(x - y) * norm2(x - ybs))) / (4 * kPi);
}

}  // namespace

TEST_CASE("half-plane kernel") {
  auto ge = GreenEvaluator::analytic(Domain::half_plane_window(0.0, 3.0, 6.0));
  CHECK(ge->green({1, 0}, {1, 1}) == doctest::Approx(std::log(5.0) / (4 * kPi)).epsilon(1e-12));
  CHECK(ge->green({1, 0}, {1, 1}) == doctest::Approx(0.128068).epsilon(1e-5));
  CHECK(ge->robin({0.5, 0}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ge->robin({0.7, 0.3}) == doctest::Approx(std::log(1.4) / kTwoPi).epsilon(1e-12));
}

TEST_CASE("Turkington kernel") {
  auto ge = GreenEvaluator::analytic(Domain::disc_complement_window(1.0, 6.0, 8.0));
  CHECK(ge->green({2, 0}, {3, 0}) == doctest::Approx(std::log(625.0 / 49.0) / (4 * kPi)).epsilon(1e-12));
  CHECK(ge->green({2, 0}, {3, 0}) == doctest::Approx(0.202598).epsilon(1e-5));
  for (Vec2 x : {Vec2{1.5, 0.7}, Vec2{0.4, 1.2}, Vec2{3.0, -2.0}})
    for (Vec2 y : {Vec2{2.2, 0.1}, Vec2{0.9, -1.1}})
      CHECK(ge->green(x, y) == doctest::Approx(turkington_green(x, y)).epsilon(1e-10));
  // vanishes on the wall and on the obstacle
  CHECK(std::abs(ge->green({1e-9, 1.5}, {2, 0.3})) < 1e-8);
  CHECK(std::abs(ge->green({std::cos(0.4) * (1 + 1e-9), std::sin(0.4)}, {2, 0.3})) < 1e-8);
}

TEST_CASE("unit disc kernel") {
  auto ge = GreenEvaluator::analytic(Domain::disc(1.0));
  CHECK(ge->green({0, 0}, {0.5, 0}) == doctest::Approx(std::log(2.0) / kTwoPi).epsilon(1e-12));
  CHECK(ge->robin({0, 0}) == doctest::Approx(0.0));
  for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{-0.6, 0.3}})
    for (Vec2 y : {Vec2{0.5, 0.0}, Vec2{-0.2, -0.7}}) {
      CHECK(ge->green(x, y) == doctest::Approx(disc_green(x, y)).epsilon(1e-10));
      CHECK(ge->green(x, y) == doctest::Approx(ge->green(y, x)).epsilon(1e-12));
    }
  // H(x,x) = (1/2π) log(1 − |x|²)
  CHECK(ge->robin({0.3, 0.2}) == doctest::Approx(std::log(0.87) / kTwoPi).epsilon(1e-10));
  // finite-difference gradient
  Vec2 x{0.3, -0.4}, y{-0.1, 0.5};
  const double d = 1e-6;
  Vec2 fd{(disc_green(x + Vec2{d, 0}, y) - disc_green(x - Vec2{d, 0}, y)) / (2 * d),
          (disc_green(x + Vec2{0, d}, y) - disc_green(x - Vec2{0, d}, y)) / (2 * d)};
  Vec2 gg = ge->grad_green(x, y);
  CHECK(gg.x == doctest::Approx(fd.x).epsilon(1e-6));
  CHECK(gg.y == doctest::Approx(fd.y).epsilon(1e-6));
}

TEST_CASE("Robin function decreases monotonically toward the wall") {
  auto ge = GreenEvaluator::analytic(Domain::disc(1.0));
  double prev = ge->robin({0.0, 0.0});
  for (double r = 0.1; r < 0.999; r += 0.05) {
    double v = ge->robin({0, -r});
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("numeric Robin function matches the analytic one") {
  Domain d = Domain::disc(1.0);
  auto g = Grid::build(d, 0.01);
  auto num = GreenEvaluator::numeric(std::make_shared<PoissonSolver>(g));
  auto ana = GreenEvaluator::analytic(d);
  CHECK(std::abs(num->robin({0.3, 0.2}) - ana->robin({0.3, 0.2})) < 5e-3);
  CHECK(std::abs(num->green({0.3, 0.2}, {-0.4, 0.1}) - ana->green({0.3, 0.2}, {-0.4, 0.1})) < 5e-3);
}

TEST_CASE("Koebe construction on an annulus") {
  auto g = Grid::build(Domain::annulus(0.5, 1.0), 0.005);
  auto star = koebe_assemble(std::make_shared<PoissonSolver>(g));
  REQUIRE(star->koebe() != nullptr);
  const auto& kd = *star->koebe();
  REQUIRE(kd.Z.size() == 1);
  const double z_exact = std::log(0.75) / std::log(0.5);
  CHECK(z_exact == doctest::Approx(0.415037).epsilon(1e-6));
  for (double th : {0.0, 1.0, 2.5, 4.0})
    CHECK(std::abs(kd.Z[0].sample({0.75 * std::cos(th), 0.75 * std::sin(th)}) - z_exact) < 5e-3);
  CHECK(kd.omega(0, 0) == doctest::Approx(kTwoPi / std::log(2.0)).epsilon(0.03));

  auto [i, j] = g->nearest_node({0.0, 0.7});
  int k = g->interior_id(i, j);
  REQUIRE(k >= 0);
  CHECK(koebe_flux_defect(*star, std::size_t(k)) < 1e-6);
}

TEST_CASE("Koebe assembly needs a hole") {
  auto g = Grid::build(Domain::disc(1.0), 0.05);
  CHECK_THROWS_AS(koebe_assemble(std::make_shared<PoissonSolver>(g)), Error);
}

TEST_CASE("boundary expansion of the Robin function") {
  auto disc = GreenEvaluator::analytic(Domain::disc(1.0));
  auto e1 = boundary_h_expansion(*disc, {1, 0}, {1, 0}, {1e-3});
  CHECK(e1.curvature == doctest::Approx(1.0));
  CHECK(e1.r[0] == doctest::Approx(-1 / (4 * kPi)).epsilon(0.01));
  // exact disc Robin: r(ε) = [log(2δ − δ²) − log 2δ]/(2πε), δ = ε
  CHECK(e1.r[0] == doctest::Approx(std::log(1 - 0.5e-3) / (kTwoPi * 1e-3)).epsilon(1e-8));

  auto e2 = boundary_h_expansion(*disc, {1, 0}, {1, 1}, {1e-2, 5e-3, 2e-3, 1e-3});
  CHECK(e2.predicted == doctest::Approx(-1 / kTwoPi).epsilon(1e-12));
  CHECK(e2.limit == doctest::Approx(-1 / kTwoPi).epsilon(0.02));

  auto half = GreenEvaluator::analytic(Domain::half_plane_window(0.0, 2.0, 4.0));
  auto e3 = boundary_h_expansion(*half, {0, 0.2}, {0.7, -0.4}, {1e-2, 1e-3});
  for (double r : e3.r) CHECK(std::abs(r) < 1e-10);

  CHECK_THROWS_AS(boundary_h_expansion(*disc, {0.5, 0}, {1, 0}, {1e-3}), Error);
}

TEST_CASE("whole-plane kernel has no Robin function") {
  auto wp = GreenEvaluator::whole_plane();
  CHECK(wp->green({0, 0}, {1, 0}) == doctest::Approx(0.0));
  CHECK(wp->green({0, 0}, {0.5, 0}) == doctest::Approx(std::log(2.0) / kTwoPi));
  try {
    wp->robin({0, 0});
    FAIL("expected UndefinedRobin");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndefinedRobin);
  }
}

TEST_CASE("numeric kernel is symmetric on node pairs") {
  auto g = Grid::build(Domain::annulus(0.3, 1.0), 1.0 / 48);
  auto ge = GreenEvaluator::numeric(std::make_shared<PoissonSolver>(g));
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, g->interior_count() - 1);
  for (int t = 0; t < 8; ++t) {
    Vec2 x = g->interior_point(pick(rng)), y = g->interior_point(pick(rng));
    if (dist(x, y) < 1e-12) continue;
    CHECK(std::abs(ge->green(x, y) - ge->green(y, x)) < 1e-8);
  }
}

TEST_CASE("numeric kernel is O(h) next to the Dirichlet boundary") {
  // largest G(·, 0) over nodes with a boundary neighbour, relative to G at |x| = 1/2
  auto edge_ratio = [](double h) {
    auto g = Grid::build(Domain::disc(1.0), h);
    auto ge = GreenEvaluator::numeric(std::make_shared<PoissonSolver>(g));
    auto [i, j] = g->nearest_node({0, 0});
    auto src = ge->source_field(std::size_t(g->interior_id(i, j)));
    double m = 0;
    for (std::size_t k = 0; k < g->interior_count(); ++k)
      for (int n : g->neighbours(k))
        if (n < 0) m = std::max(m, std::abs(src->interior()[k]));
    return m / src->sample({0.5, 0});
  };
  double a = edge_ratio(1.0 / 32), b = edge_ratio(1.0 / 64);
  CHECK(a < 4.0 / 32);
  CHECK(b < 4.0 / 64);
  CHECK(b / a == doctest::Approx(0.5).epsilon(0.2));
}
