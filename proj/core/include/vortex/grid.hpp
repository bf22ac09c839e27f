#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vortex/domain.hpp"

namespace vortex {

struct GridNode {
  int i = 0, j = 0;
};

// A Dirichlet node. Where a grid line leaves the domain between two lattice nodes the
// boundary node sits on the crossing itself (one per cut arm); lattice nodes on or within
// 1e-3 h of the boundary, and plate nodes, are shared by all their interior neighbours.
struct BoundaryNode {
  int i = 0, j = 0;  // lattice node the arm points at
  Vec2 x;            // where the boundary value lives
  Vec2 foot;         // nearest point of the analytic boundary (x itself for plate nodes)
  int piece = -1;  // -1 for plate nodes
  int component = 0;
  BoundaryTag tag = BoundaryTag::Physical;
};

// Extra Dirichlet set carved out of the domain (condenser plate K).
using NodePredicate = std::function<bool(Vec2)>;
// Optional signed level of the plate (≤ 0 on K). When given, plate nodes are those with
// level ≤ 1e-3 h and arms reaching into K are cut where the level crosses zero.
using PlateLevel = std::function<double(Vec2)>;

class Grid {
 public:
  // Neighbour encoding: >= 0 interior index, < 0 means boundary index -(code+1).
  using Neighbours = std::array<int, 4>;  // E, W, N, S

  static std::shared_ptr<const Grid> build(const Domain& d, double h, NodePredicate plate = {},
                                          PlateLevel plate_level = {});

  const Domain& domain() const { return domain_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Vec2 node(int i, int j) const {
    return {domain_.anchor().x + (i0_ + i) * h_, domain_.anchor().y + (j0_ + j) * h_};
  }
  Vec2 interior_point(std::size_t k) const { return node(interior_[k].i, interior_[k].j); }

  std::size_t interior_count() const { return interior_.size(); }
  std::size_t boundary_count() const { return boundary_.size(); }
  std::span<const GridNode> interior_nodes() const { return interior_; }
  std::span<const BoundaryNode> boundary_nodes() const { return boundary_; }
  const Neighbours& neighbours(std::size_t k) const { return nbr_[k]; }
  // arm lengths in units of h, same order as neighbours; < 1 only toward a cut boundary node
  const std::array<double, 4>& arms(std::size_t k) const { return arm_[k]; }

  // -1 when (i, j) is not an interior (resp. boundary) node or lies off the box
  int interior_id(int i, int j) const;
  int boundary_id(int i, int j) const;

  // lower-left box index of the cell containing p (may be off the box)
  std::array<int, 2> cell_of(Vec2 p) const;
  // nearest box node
  std::array<int, 2> nearest_node(Vec2 p) const;

  // number of Dirichlet components: outer (0), holes (1..m), plate (m+1 if present)
  int component_count() const { return components_; }
  int plate_component() const { return has_plate_ ? components_ - 1 : -1; }

 private:
  Grid(const Domain& d) : domain_(d) {}

  Domain domain_;
  double h_ = 0;
  int i0_ = 0, j0_ = 0, nx_ = 0, ny_ = 0;
  int components_ = 1;
  bool has_plate_ = false;
  std::vector<GridNode> interior_;
  std::vector<BoundaryNode> boundary_;
  std::vector<Neighbours> nbr_;
  std::vector<std::array<double, 4>> arm_;
  std::vector<int> interior_index_;
  std::vector<int> boundary_index_;
};

}  // namespace vortex
