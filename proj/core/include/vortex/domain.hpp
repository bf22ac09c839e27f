#pragma once

#include <string>
#include <vector>

#include "vortex/vec2.hpp"

namespace vortex {

enum class DomainKind { Disc, Rectangle, Annulus, HalfPlaneWindow, DiscComplementWindow };
enum class BoundaryTag { Physical, Artificial };

std::string to_string(DomainKind k);

struct Box {
  Vec2 lo, hi;
};

// One smooth piece of the boundary: a straight segment or a circular arc.
struct BoundaryPiece {
  enum class Shape { Segment, Arc };
  Shape shape = Shape::Segment;
  Vec2 a, b;                  // segment end points
  Vec2 center;                // arc
  double radius = 0.0;
  double theta0 = 0.0;        // arc runs counterclockwise from theta0 to theta1
  double theta1 = 0.0;
  BoundaryTag tag = BoundaryTag::Physical;
  int component = 0;          // 0 = outer boundary, k >= 1 = k-th hole
  double curvature = 0.0;     // seen from inside the domain (disc of radius R: 1/R)

  Vec2 project(Vec2 p) const;
  double distance(Vec2 p) const { return norm(p - project(p)); }
  // unit normal pointing into the domain at a point of the piece
  Vec2 inward_normal(Vec2 on) const;
  double length() const;
};

struct DiscHole {
  Vec2 center;
  double radius;
};

struct NearestBoundary {
  int piece = -1;
  Vec2 point;
  double distance = 0.0;
};

class Domain {
 public:
  static Domain disc(double R, Vec2 center = {});
  static Domain rectangle(double a, double b, double c, double d);
  static Domain annulus(double inner, double outer);
  // [a0, a0+width] x [-height/2, height/2]; the edge x1 = a0 is physical
  static Domain half_plane_window(double a0, double width, double height);
  // {x1 > 0, |x| > R} cut to x1 < width, |x2| < height/2
  static Domain disc_complement_window(double r_obs, double width, double height);

  // Disc and Rectangle only: punch a circular hole (multiply-connected variants).
  Domain with_hole(Vec2 center, double radius) const;

  DomainKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<DiscHole>& holes() const { return holes_; }
  // number of inner boundary components (annulus inner circle counts)
  int hole_count() const;
  bool is_window() const {
    return kind_ == DomainKind::HalfPlaneWindow || kind_ == DomainKind::DiscComplementWindow;
  }

  bool contains(Vec2 p) const;  // closed domain
  bool contains_strictly(Vec2 p, double margin = 0.0) const;
  double area() const;
  double boundary_length() const;
  double diameter() const;
  double min_feature() const;
  Box bounding_box() const;
  // grid nodes are laid out on anchor + h*Z^2
  Vec2 anchor() const;

  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  NearestBoundary nearest_boundary(Vec2 p) const;
  double distance_to_boundary(Vec2 p) const { return nearest_boundary(p).distance; }

  std::string describe() const;

 private:
  Domain() = default;
  void build_pieces();

  DomainKind kind_ = DomainKind::Disc;
  std::vector<double> params_;
  Vec2 center_;
  std::vector<DiscHole> holes_;
  std::vector<BoundaryPiece> pieces_;
};

// Signed curvature of a physical boundary piece at x̄.
double curvature_at(const Domain& d, Vec2 xbar, double tol = 1e-9);

}  // namespace vortex
