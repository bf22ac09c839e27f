#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vortex/grid.hpp"

namespace vortex {

// Scalar field on the interior nodes of a grid, together with its boundary values.
class GridField {
 public:
  GridField() = default;
  explicit GridField(std::shared_ptr<const Grid> g)
      : grid_(std::move(g)), interior_(grid_->interior_count(), 0.0), boundary_(grid_->boundary_count(), 0.0) {}
  GridField(std::shared_ptr<const Grid> g, std::vector<double> interior, std::vector<double> boundary);

  static GridField from_function(std::shared_ptr<const Grid> g, const std::function<double(Vec2)>& f);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  bool empty() const { return !grid_; }

  std::vector<double>& interior() { return interior_; }
  const std::vector<double>& interior() const { return interior_; }
  std::vector<double>& boundary() { return boundary_; }
  const std::vector<double>& boundary() const { return boundary_; }

  // value at box node (i, j); NaN when the node is neither interior nor boundary
  double at(int i, int j) const;
  // bilinear interpolation, renormalised over the active corners near the boundary
  double sample(Vec2 p) const;

  double max_interior() const;
  double min_interior() const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> interior_;
  std::vector<double> boundary_;
};

}  // namespace vortex
