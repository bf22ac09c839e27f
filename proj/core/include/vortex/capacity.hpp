#pragma once

#include <string>
#include <vector>

#include "vortex/domain.hpp"
#include "vortex/poisson.hpp"

namespace vortex {

// complete elliptic integral of the first kind, modulus γ ∈ [0, 1)
double elliptic_K(double gamma);

struct SegmentRayCapacity {
  double s = 0;
  double capa = 0;   // capa([−1,0], R² ∖ [s,∞)) = 2 𝒦(√(1/(1+s))) / 𝒦(√(s/(1+s)))
  double lhs = 0;    // 2π / capa
  double bound = 0;  // log 16(1+s)
  bool bound_ok = false;
};

SegmentRayCapacity capacity_segment_ray(double s);

// Compact condenser plate: disc, axis-aligned rectangle, or segment (one node thick on the grid).
struct CompactSet {
  enum class Kind { Disc, Rectangle, Segment };
  Kind kind = Kind::Disc;
  Vec2 a, b;  // rectangle corners (lo, hi) or segment ends
  Vec2 center;
  double radius = 0;

  static CompactSet disc(Vec2 c, double r);
  static CompactSet rectangle(Vec2 lo, Vec2 hi);
  static CompactSet segment(Vec2 a, Vec2 b);

  bool contains(Vec2 x, double h) const;
  double area() const;
  double diameter() const;
  double sup_norm2() const;  // sup_{x∈K} |x|²
  std::vector<Vec2> outline(int n = 256) const;
  std::string describe() const;
};

struct CapacitySpec {
  Domain omega = Domain::disc(1.0);
  CompactSet K;
  double h = 0.01;
  SolverMethod method = SolverMethod::Pcg;
};

struct CapacityResult {
  double capa = 0;        // cell-quadrature Dirichlet energy of the condenser potential
  double capa_form = 0;   // the same energy in the operator form (discrete variational capacity)
  double gap = 0;         // dist(K, ∂Ω) measured from the plate nodes
  std::size_t plate_nodes = 0;
  std::size_t unknowns = 0;
};

CapacityResult capacity_numeric(const CapacitySpec& spec);

// numeric condenser for the segment–ray pair, carried conformally to [−t, t] ⊂ B(0,1)
struct SegmentRayNumeric {
  double s = 0, t = 0, h = 0;
  double exact = 0, numeric = 0, rel_error = 0;
};

double segment_ray_disc_halfwidth(double s);
SegmentRayNumeric segment_ray_numeric(double s, double h = 0);

struct BoundCheck {
  std::string name;
  std::string bound;  // measure, sup-norm, obstacle-ball, connected
  double capa = 0;
  double lhs = 0;    // c / capa
  double rhs = 0;
  double slack = 0;  // rhs − lhs
  bool holds = false;  // with the capacity inflated by the discretisation slack
};

struct BoundsReport {
  double h = 0;
  double capa_slack = 0.02;
  std::vector<BoundCheck> checks;
  int violations = 0;
};

BoundsReport check_capacity_bounds(double h, double capa_slack = 0.02);

}  // namespace vortex
