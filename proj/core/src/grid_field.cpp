#include "vortex/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortex/error.hpp"

namespace vortex {

GridField::GridField(std::shared_ptr<const Grid> g, std::vector<double> interior, std::vector<double> boundary)
    : grid_(std::move(g)), interior_(std::move(interior)), boundary_(std::move(boundary)) {
  if (interior_.size() != grid_->interior_count() || boundary_.size() != grid_->boundary_count())
    fail(ErrorCode::DimensionMismatch, "field size does not match grid");
}

GridField GridField::from_function(std::shared_ptr<const Grid> g, const std::function<double(Vec2)>& f) {
  GridField u(g);
  for (std::size_t k = 0; k < g->interior_count(); ++k) u.interior_[k] = f(g->interior_point(k));
  auto bn = g->boundary_nodes();
  for (std::size_t k = 0; k < bn.size(); ++k) u.boundary_[k] = f(bn[k].x);
  return u;
}

double GridField::at(int i, int j) const {
  int k = grid_->interior_id(i, j);
  if (k >= 0) return interior_[k];
  k = grid_->boundary_id(i, j);
  if (k >= 0) return boundary_[k];
  return std::numeric_limits<double>::quiet_NaN();
}

double GridField::sample(Vec2 p) const {
  auto c = grid_->cell_of(p);
  Vec2 o = grid_->node(c[0], c[1]);
  double tx = std::clamp((p.x - o.x) / grid_->h(), 0.0, 1.0);
  double ty = std::clamp((p.y - o.y) / grid_->h(), 0.0, 1.0);
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
  double acc = 0, wsum = 0;
  for (int s = 0; s < 4; ++s) {
    double v = at(c[0] + di[s], c[1] + dj[s]);
    if (std::isnan(v)) continue;
    acc += w[s] * v;
    wsum += w[s];
  }
  if (wsum <= 1e-12) {
    // fall back to the nearest active node
    auto n = grid_->nearest_node(p);
    double v = at(n[0], n[1]);
    if (std::isnan(v)) fail(ErrorCode::OutsideDomain, "sample point outside the grid");
    return v;
  }
  return acc / wsum;
}

double GridField::max_interior() const { return *std::max_element(interior_.begin(), interior_.end()); }
double GridField::min_interior() const { return *std::min_element(interior_.begin(), interior_.end()); }

}  // namespace vortex
