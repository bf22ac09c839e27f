#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "vortex/domain.hpp"
#include "vortex/error.hpp"
#include "vortex/grid.hpp"

using namespace vortex;

namespace {

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

TEST_CASE("disc area and boundary length") {
  Domain d = Domain::disc(1.0);
  CHECK(d.area() == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(d.boundary_length() == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(d.contains({0.5, 0.5}));
  CHECK_FALSE(d.contains({0.8, 0.8}));
}

TEST_CASE("annulus with inner radius above outer is rejected") {
  CHECK(code_of([] { Domain::annulus(2.0, 1.0); }) == ErrorCode::InvalidGeometry);
  Domain a = Domain::annulus(0.5, 1.0);
  CHECK(a.area() == doctest::Approx(kPi * 0.75));
  CHECK(a.hole_count() == 1);
  CHECK_FALSE(a.contains_strictly({0.2, 0.0}));
}

TEST_CASE("disc-complement window: hole masked, straight cuts artificial") {
  Domain d = Domain::disc_complement_window(1.0, 6.0, 6.0);
  CHECK_FALSE(d.contains_strictly({0.5, 0.0}));
  CHECK(d.contains_strictly({2.0, 0.0}));
  int artificial = 0, physical_arcs = 0;
  for (const auto& p : d.pieces()) {
    if (p.shape == BoundaryPiece::Shape::Segment) {
      // x1 = 0 axis pieces are the physical wall, the far cuts are artificial
      bool on_wall = std::abs(p.a.x) < 1e-12 && std::abs(p.b.x) < 1e-12;
      CHECK((p.tag == BoundaryTag::Physical) == on_wall);
      if (p.tag == BoundaryTag::Artificial) ++artificial;
    } else {
      CHECK(p.tag == BoundaryTag::Physical);
      ++physical_arcs;
    }
  }
  CHECK(artificial == 3);
  CHECK(physical_arcs == 1);
}

TEST_CASE("grid of the unit square at h = 1/4 has 3x3 interior nodes") {
  auto g = Grid::build(Domain::rectangle(0, 1, 0, 1), 0.25);
  CHECK(g->interior_count() == 9);
}

TEST_CASE("disc grid count against direct lattice enumeration") {
  const double h = 0.05;
  Domain d = Domain::disc(1.0);
  auto g = Grid::build(d, h);
  // lattice points strictly inside the unit circle
  std::size_t inside = 0;
  for (int i = -25; i <= 25; ++i)
    for (int j = -25; j <= 25; ++j)
      if ((i * h) * (i * h) + (j * h) * (j * h) < 1.0 - 1e-12) ++inside;
  CHECK(g->interior_count() <= inside);
  CHECK(std::abs(double(g->interior_count()) - kPi / (h * h)) < 0.05 * kPi / (h * h));
  // nodes within the boundary-snapping distance are the only ones removed
  CHECK(inside - g->interior_count() < 4 * 40);
}

TEST_CASE("interior count approaches area / h^2") {
  Domain d = Domain::annulus(0.3, 1.0);
  double prev = 1.0;
  for (double h : {0.04, 0.02, 0.01}) {
    auto g = Grid::build(d, h);
    double rel = std::abs(g->interior_count() * h * h - d.area()) / d.area();
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("mesh wider than the domain") {
  CHECK(code_of([] { Grid::build(Domain::disc(1.0), 3.0); }) == ErrorCode::MeshTooCoarse);
}

TEST_CASE("boundary curvature") {
  CHECK(curvature_at(Domain::disc(1.0), {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(curvature_at(Domain::disc(2.0), {std::sqrt(2.0), -std::sqrt(2.0)}) == doctest::Approx(0.5));
  CHECK(curvature_at(Domain::half_plane_window(0.0, 2.0, 4.0), {0.0, 0.3}) == doctest::Approx(0.0));
  CHECK(code_of([] { curvature_at(Domain::disc(1.0), {0.5, 0.0}); }) == ErrorCode::NotOnBoundary);
}

TEST_CASE("nearest boundary point of the disc is the radial projection") {
  Domain d = Domain::disc(1.0);
  auto nb = d.nearest_boundary({0.3, 0.4});
  CHECK(nb.distance == doctest::Approx(0.5));
  CHECK(nb.point.x == doctest::Approx(0.6));
  CHECK(nb.point.y == doctest::Approx(0.8));
}

TEST_CASE("disc area error is O(h)") {
  // C measured once on this discretisation (max ≈ 0.92) and kept as a regression bound
  const double C = 1.0;
  for (double h : {0.1, 0.05, 0.025}) {
    auto g = Grid::build(Domain::disc(1.0), h);
    CHECK(std::abs(g->interior_count() * h * h - kPi) <= C * h);
  }
}

TEST_CASE("reflection-symmetric domains give reflection-symmetric node sets") {
  for (const Domain& d : {Domain::disc(1.0), Domain::annulus(0.4, 1.0), Domain::disc_complement_window(1.0, 4.0, 6.0)}) {
    auto g = Grid::build(d, 0.05);
    for (std::size_t k = 0; k < g->interior_count(); ++k) {
      Vec2 p = g->interior_point(k);
      auto [i, j] = g->nearest_node({p.x, -p.y});
      REQUIRE(g->interior_id(i, j) >= 0);
      CHECK(std::abs(g->node(i, j).y + p.y) < 1e-12);
      CHECK(std::abs(g->node(i, j).x - p.x) < 1e-12);
    }
    // the boundary multiset reflects too
    std::vector<std::pair<double, double>> a, b;
    for (const auto& bn : g->boundary_nodes()) {
      a.emplace_back(std::round(bn.x.x * 1e9), std::round(bn.x.y * 1e9));
      b.emplace_back(std::round(bn.x.x * 1e9), std::round(-bn.x.y * 1e9));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("every boundary node carries one valid tag") {
  auto g = Grid::build(Domain::disc_complement_window(1.0, 4.0, 6.0), 0.05);
  int phys = 0, art = 0;
  for (const auto& bn : g->boundary_nodes()) {
    if (bn.tag == BoundaryTag::Physical) ++phys;
    else if (bn.tag == BoundaryTag::Artificial) ++art;
  }
  CHECK(phys + art == int(g->boundary_count()));
  CHECK(phys > 0);
  CHECK(art > 0);
}
