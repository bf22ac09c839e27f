#include "vortex/grid.hpp"

#include <cmath>
#include <cstdint>

#include "vortex/error.hpp"

namespace vortex {

namespace {
// kEdge: on the boundary or closer than kEdgeTol·h to it; becomes a shared boundary node
enum : std::uint8_t { kOutside = 0, kInside = 1, kPlate = 2, kEdge = 3 };
constexpr double kEdgeTol = 1e-3;
}

std::shared_ptr<const Grid> Grid::build(const Domain& d, double h, NodePredicate plate, PlateLevel plate_level) {
  if (plate_level && !plate) plate = [&](Vec2 p) { return plate_level(p) <= kEdgeTol * h; };
  if (!(h > 0) || !std::isfinite(h)) fail(ErrorCode::MeshTooCoarse, "mesh width must be positive");
  if (!(h < d.min_feature())) fail(ErrorCode::MeshTooCoarse, "mesh width exceeds the smallest geometric feature");

  std::shared_ptr<Grid> g(new Grid(d));
  g->h_ = h;
  Box bb = d.bounding_box();
  Vec2 a = d.anchor();
  g->i0_ = static_cast<int>(std::floor((bb.lo.x - a.x) / h)) - 1;
  g->j0_ = static_cast<int>(std::floor((bb.lo.y - a.y) / h)) - 1;
  int i1 = static_cast<int>(std::ceil((bb.hi.x - a.x) / h)) + 1;
  int j1 = static_cast<int>(std::ceil((bb.hi.y - a.y) / h)) + 1;
  g->nx_ = i1 - g->i0_ + 1;
  g->ny_ = j1 - g->j0_ + 1;
  const int nx = g->nx_, ny = g->ny_;

  std::vector<std::uint8_t> state(static_cast<std::size_t>(nx) * ny, kOutside);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Vec2 p = g->node(i, j);
      if (!d.contains(p)) continue;
      std::uint8_t& st = state[j * nx + i];
      if (plate && plate(p)) st = kPlate;
      else st = d.distance_to_boundary(p) > kEdgeTol * h ? kInside : kEdge;
    }
  g->has_plate_ = static_cast<bool>(plate);
  g->components_ = d.hole_count() + 1 + (g->has_plate_ ? 1 : 0);

  g->interior_index_.assign(state.size(), -1);
  g->boundary_index_.assign(state.size(), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (state[j * nx + i] == kInside) {
        // the bounding box carries a margin, so interior nodes never touch its edge
        g->interior_index_[j * nx + i] = static_cast<int>(g->interior_.size());
        g->interior_.push_back({i, j});
      }
  if (g->interior_.empty()) fail(ErrorCode::MeshTooCoarse, "no interior nodes");

  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  const int plate_comp = g->plate_component();
  std::vector<int> per_component(g->components_, 0);
  auto add_boundary = [&](BoundaryNode b) {
    if (b.component != plate_comp) {
      auto nb = d.nearest_boundary(b.x);
      b.foot = nb.point;
      b.piece = nb.piece;
      b.component = d.pieces()[nb.piece].component;
      b.tag = d.pieces()[nb.piece].tag;
    }
    ++per_component[b.component];
    g->boundary_.push_back(b);
    return static_cast<int>(g->boundary_.size()) - 1;
  };

  g->nbr_.resize(g->interior_.size());
  g->arm_.resize(g->interior_.size());
  for (std::size_t k = 0; k < g->interior_.size(); ++k) {
    const auto n = g->interior_[k];
    const Vec2 p = g->node(n.i, n.j);
    for (int s = 0; s < 4; ++s) {
      const int i = n.i + di[s], j = n.j + dj[s];
      const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      g->arm_[k][s] = 1.0;
      if (g->interior_index_[idx] >= 0) {
        g->nbr_[k][s] = g->interior_index_[idx];
        continue;
      }
      if (state[idx] == kPlate && plate_level) {
        // cut the arm where it enters K
        const Vec2 e{double(di[s]), double(dj[s])};
        double lo = 0, hi = h;
        for (int it = 0; it < 60 && hi - lo > 1e-14 * h; ++it) {
          double mid = 0.5 * (lo + hi);
          (plate_level(p + mid * e) > 0 ? lo : hi) = mid;
        }
        if (hi < h * (1 - kEdgeTol)) {
          BoundaryNode b;
          b.i = i;
          b.j = j;
          b.x = b.foot = p + hi * e;
          b.component = plate_comp;
          g->arm_[k][s] = std::max(hi / h, kEdgeTol);
          g->nbr_[k][s] = -(add_boundary(b) + 1);
          continue;
        }
      }
      if (state[idx] != kOutside) {
        // shared lattice boundary node
        if (g->boundary_index_[idx] < 0) {
          BoundaryNode b;
          b.i = i;
          b.j = j;
          b.x = b.foot = g->node(i, j);
          if (state[idx] == kPlate) b.component = plate_comp;
          g->boundary_index_[idx] = add_boundary(b);
        }
        g->nbr_[k][s] = -(g->boundary_index_[idx] + 1);
        continue;
      }
      // the arm leaves the domain: locate the crossing
      const Vec2 e{double(di[s]), double(dj[s])};
      double lo = 0, hi = h;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * h; ++it) {
        double mid = 0.5 * (lo + hi);
        (d.contains(p + mid * e) ? lo : hi) = mid;
      }
      BoundaryNode b;
      b.i = i;
      b.j = j;
      b.x = p + lo * e;
      g->arm_[k][s] = std::max(lo / h, kEdgeTol);
      g->nbr_[k][s] = -(add_boundary(b) + 1);
    }
  }
  // remaining lattice nodes on the boundary (corners of grid-aligned edges) carry data too
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      if (state[idx] != kEdge || g->boundary_index_[idx] >= 0) continue;
      BoundaryNode b;
      b.i = i;
      b.j = j;
      b.x = b.foot = g->node(i, j);
      g->boundary_index_[idx] = add_boundary(b);
    }
  for (int c = 0; c < g->components_; ++c)
    if (per_component[c] == 0) fail(ErrorCode::MeshTooCoarse, "a boundary component captures no nodes");
  return g;
}

int Grid::interior_id(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return interior_index_[static_cast<std::size_t>(j) * nx_ + i];
}

int Grid::boundary_id(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return boundary_index_[static_cast<std::size_t>(j) * nx_ + i];
}

std::array<int, 2> Grid::cell_of(Vec2 p) const {
  Vec2 a = domain_.anchor();
  return {static_cast<int>(std::floor((p.x - a.x) / h_)) - i0_, static_cast<int>(std::floor((p.y - a.y) / h_)) - j0_};
}

std::array<int, 2> Grid::nearest_node(Vec2 p) const {
  Vec2 a = domain_.anchor();
  return {static_cast<int>(std::lround((p.x - a.x) / h_)) - i0_, static_cast<int>(std::lround((p.y - a.y) / h_)) - j0_};
}

}  // namespace vortex
