#include "vortex/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vortex/error.hpp"

namespace vortex {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidGeometry, std::string(name) + " must be positive");
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

BoundaryPiece segment(Vec2 a, Vec2 b, BoundaryTag tag, int comp) {
  BoundaryPiece p;
  p.shape = BoundaryPiece::Shape::Segment;
  p.a = a;
  p.b = b;
  p.tag = tag;
  p.component = comp;
  return p;
}

BoundaryPiece arc(Vec2 c, double r, double t0, double t1, double curvature, int comp) {
  BoundaryPiece p;
  p.shape = BoundaryPiece::Shape::Arc;
  p.center = c;
  p.radius = r;
  p.theta0 = t0;
  p.theta1 = t1;
  p.curvature = curvature;
  p.component = comp;
  return p;
}

}  // namespace

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Disc: return "disc";
    case DomainKind::Rectangle: return "rectangle";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::HalfPlaneWindow: return "half_plane_window";
    case DomainKind::DiscComplementWindow: return "disc_complement_window";
  }
  return "?";
}

Vec2 BoundaryPiece::project(Vec2 p) const {
  if (shape == Shape::Segment) {
    Vec2 d = b - a;
    double t = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
    return a + t * d;
  }
  Vec2 r = p - center;
  double th = std::atan2(r.y, r.x);
  double span = theta1 - theta0;
  double rel = wrap_angle(th - theta0);
  if (span >= kTwoPi - 1e-14 || rel <= span) {
    double n = norm(r);
    Vec2 dir = n > 0 ? r / n : Vec2{std::cos(theta0), std::sin(theta0)};
    return center + radius * dir;
  }
  Vec2 e0 = center + radius * Vec2{std::cos(theta0), std::sin(theta0)};
  Vec2 e1 = center + radius * Vec2{std::cos(theta1), std::sin(theta1)};
  return dist(p, e0) < dist(p, e1) ? e0 : e1;
}

Vec2 BoundaryPiece::inward_normal(Vec2 on) const {
  if (shape == Shape::Segment) {
    // segments are stored with the domain on their left
    Vec2 d = (b - a) / norm(b - a);
    return {-d.y, d.x};
  }
  Vec2 r = (on - center) / norm(on - center);
  return curvature > 0 ? -r : r;
}

double BoundaryPiece::length() const {
  if (shape == Shape::Segment) return norm(b - a);
  return radius * (theta1 - theta0);
}

Domain Domain::disc(double R, Vec2 center) {
  require_positive(R, "disc radius");
  Domain d;
  d.kind_ = DomainKind::Disc;
  d.params_ = {R};
  d.center_ = center;
  d.build_pieces();
  return d;
}

Domain Domain::rectangle(double a, double b, double c, double dd) {
  require_positive(b - a, "rectangle width");
  require_positive(dd - c, "rectangle height");
  Domain d;
  d.kind_ = DomainKind::Rectangle;
  d.params_ = {a, b, c, dd};
  d.build_pieces();
  return d;
}

Domain Domain::annulus(double inner, double outer) {
  require_positive(inner, "annulus inner radius");
  require_positive(outer, "annulus outer radius");
  if (!(inner < outer)) fail(ErrorCode::InvalidGeometry, "annulus needs inner < outer");
  Domain d;
  d.kind_ = DomainKind::Annulus;
  d.params_ = {inner, outer};
  d.build_pieces();
  return d;
}

Domain Domain::half_plane_window(double a0, double width, double height) {
  require_positive(width, "window width");
  require_positive(height, "window height");
  if (!std::isfinite(a0)) fail(ErrorCode::InvalidGeometry, "window offset must be finite");
  Domain d;
  d.kind_ = DomainKind::HalfPlaneWindow;
  d.params_ = {a0, width, height};
  d.build_pieces();
  return d;
}

Domain Domain::disc_complement_window(double r_obs, double width, double height) {
  require_positive(r_obs, "obstacle radius");
  require_positive(width, "window width");
  require_positive(height, "window height");
  if (!(r_obs < width && r_obs < height / 2))
    fail(ErrorCode::InvalidGeometry, "obstacle must fit inside the window");
  Domain d;
  d.kind_ = DomainKind::DiscComplementWindow;
  d.params_ = {r_obs, width, height};
  d.build_pieces();
  return d;
}

Domain Domain::with_hole(Vec2 c, double r) const {
  if (kind_ != DomainKind::Disc && kind_ != DomainKind::Rectangle)
    fail(ErrorCode::InvalidGeometry, "holes are supported for disc and rectangle domains");
  require_positive(r, "hole radius");
  Domain d = *this;
  // the closed hole must sit strictly inside the outer component and away from other holes
  Domain outer = *this;
  outer.holes_.clear();
  outer.build_pieces();
  if (!outer.contains_strictly(c, r)) fail(ErrorCode::InvalidGeometry, "hole not strictly inside the outer boundary");
  for (const auto& o : holes_)
    if (dist(o.center, c) <= o.radius + r) fail(ErrorCode::InvalidGeometry, "holes overlap");
  d.holes_.push_back({c, r});
  d.build_pieces();
  return d;
}

int Domain::hole_count() const {
  return static_cast<int>(holes_.size()) + (kind_ == DomainKind::Annulus ? 1 : 0);
}

void Domain::build_pieces() {
  pieces_.clear();
  const auto& p = params_;
  switch (kind_) {
    case DomainKind::Disc:
      pieces_.push_back(arc(center_, p[0], 0.0, kTwoPi, 1.0 / p[0], 0));
      break;
    case DomainKind::Rectangle: {
      Vec2 A{p[0], p[2]}, B{p[1], p[2]}, C{p[1], p[3]}, D{p[0], p[3]};
      pieces_.push_back(segment(A, B, BoundaryTag::Physical, 0));
      pieces_.push_back(segment(B, C, BoundaryTag::Physical, 0));
      pieces_.push_back(segment(C, D, BoundaryTag::Physical, 0));
      pieces_.push_back(segment(D, A, BoundaryTag::Physical, 0));
      break;
    }
    case DomainKind::Annulus:
      pieces_.push_back(arc({}, p[1], 0.0, kTwoPi, 1.0 / p[1], 0));
      pieces_.push_back(arc({}, p[0], 0.0, kTwoPi, -1.0 / p[0], 1));
      break;
    case DomainKind::HalfPlaneWindow: {
      double a0 = p[0], w = p[1], hh = p[2] / 2;
      Vec2 A{a0, -hh}, B{a0 + w, -hh}, C{a0 + w, hh}, D{a0, hh};
      pieces_.push_back(segment(D, A, BoundaryTag::Physical, 0));
      pieces_.push_back(segment(A, B, BoundaryTag::Artificial, 0));
      pieces_.push_back(segment(B, C, BoundaryTag::Artificial, 0));
      pieces_.push_back(segment(C, D, BoundaryTag::Artificial, 0));
      break;
    }
    case DomainKind::DiscComplementWindow: {
      double R = p[0], w = p[1], hh = p[2] / 2;
      pieces_.push_back(segment({0, hh}, {0, R}, BoundaryTag::Physical, 0));
      // the half circle is traversed clockwise (domain outside), stored as a ccw arc
      pieces_.push_back(arc({}, R, -kPi / 2, kPi / 2, -1.0 / R, 0));
      pieces_.push_back(segment({0, -R}, {0, -hh}, BoundaryTag::Physical, 0));
      pieces_.push_back(segment({0, -hh}, {w, -hh}, BoundaryTag::Artificial, 0));
      pieces_.push_back(segment({w, -hh}, {w, hh}, BoundaryTag::Artificial, 0));
      pieces_.push_back(segment({w, hh}, {0, hh}, BoundaryTag::Artificial, 0));
      break;
    }
  }
  int comp = kind_ == DomainKind::Annulus ? 2 : 1;
  for (const auto& h : holes_) pieces_.push_back(arc(h.center, h.radius, 0.0, kTwoPi, -1.0 / h.radius, comp++));
}

bool Domain::contains(Vec2 q) const {
  const auto& p = params_;
  const double tol = 1e-12 * std::max(1.0, diameter());
  bool in = false;
  switch (kind_) {
    case DomainKind::Disc: in = dist(q, center_) <= p[0] + tol; break;
    case DomainKind::Rectangle:
      in = q.x >= p[0] - tol && q.x <= p[1] + tol && q.y >= p[2] - tol && q.y <= p[3] + tol;
      break;
    case DomainKind::Annulus: {
      double r = norm(q);
      in = r >= p[0] - tol && r <= p[1] + tol;
      break;
    }
    case DomainKind::HalfPlaneWindow:
      in = q.x >= p[0] - tol && q.x <= p[0] + p[1] + tol && std::abs(q.y) <= p[2] / 2 + tol;
      break;
    case DomainKind::DiscComplementWindow:
      in = q.x >= -tol && q.x <= p[1] + tol && std::abs(q.y) <= p[2] / 2 + tol && norm(q) >= p[0] - tol;
      break;
  }
  if (!in) return false;
  for (const auto& h : holes_)
    if (dist(q, h.center) < h.radius - tol) return false;
  return true;
}

bool Domain::contains_strictly(Vec2 q, double margin) const {
  return contains(q) && distance_to_boundary(q) > margin;
}

double Domain::area() const {
  const auto& p = params_;
  double a = 0;
  switch (kind_) {
    case DomainKind::Disc: a = kPi * p[0] * p[0]; break;
    case DomainKind::Rectangle: a = (p[1] - p[0]) * (p[3] - p[2]); break;
    case DomainKind::Annulus: a = kPi * (p[1] * p[1] - p[0] * p[0]); break;
    case DomainKind::HalfPlaneWindow: a = p[1] * p[2]; break;
    case DomainKind::DiscComplementWindow: a = p[1] * p[2] - kPi * p[0] * p[0] / 2; break;
  }
  for (const auto& h : holes_) a -= kPi * h.radius * h.radius;
  return a;
}

double Domain::boundary_length() const {
  double L = 0;
  for (const auto& pc : pieces_) L += pc.length();
  return L;
}

Box Domain::bounding_box() const {
  const auto& p = params_;
  switch (kind_) {
    case DomainKind::Disc: return {center_ - Vec2{p[0], p[0]}, center_ + Vec2{p[0], p[0]}};
    case DomainKind::Rectangle: return {{p[0], p[2]}, {p[1], p[3]}};
    case DomainKind::Annulus: return {{-p[1], -p[1]}, {p[1], p[1]}};
    case DomainKind::HalfPlaneWindow: return {{p[0], -p[2] / 2}, {p[0] + p[1], p[2] / 2}};
    case DomainKind::DiscComplementWindow: return {{0, -p[2] / 2}, {p[1], p[2] / 2}};
  }
  return {};
}

double Domain::diameter() const {
  Box b = bounding_box();
  if (kind_ == DomainKind::Disc) return 2 * params_[0];
  if (kind_ == DomainKind::Annulus) return 2 * params_[1];
  return norm(b.hi - b.lo);
}

Vec2 Domain::anchor() const {
  const auto& p = params_;
  switch (kind_) {
    case DomainKind::Disc: return center_;
    case DomainKind::Rectangle: return {p[0], p[2]};
    case DomainKind::Annulus: return {};
    case DomainKind::HalfPlaneWindow: return {p[0], 0.0};
    case DomainKind::DiscComplementWindow: return {};
  }
  return {};
}

double Domain::min_feature() const {
  const auto& p = params_;
  double m = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case DomainKind::Disc: m = p[0]; break;
    case DomainKind::Rectangle: m = std::min(p[1] - p[0], p[3] - p[2]) / 2; break;
    case DomainKind::Annulus: m = std::min(p[0], p[1] - p[0]); break;
    case DomainKind::HalfPlaneWindow: m = std::min(p[1], p[2]) / 2; break;
    case DomainKind::DiscComplementWindow: m = std::min({p[0], p[1] - p[0], p[2] / 2 - p[0]}); break;
  }
  for (std::size_t i = 0; i < holes_.size(); ++i) {
    const auto& h = holes_[i];
    m = std::min(m, h.radius);
    // gap to the outer boundary
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& pc : pieces_)
      if (pc.component == 0) gap = std::min(gap, pc.distance(h.center) - h.radius);
    m = std::min(m, gap);
    for (std::size_t j = i + 1; j < holes_.size(); ++j)
      m = std::min(m, dist(h.center, holes_[j].center) - h.radius - holes_[j].radius);
  }
  return m;
}

NearestBoundary Domain::nearest_boundary(Vec2 q) const {
  NearestBoundary best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    Vec2 f = pieces_[i].project(q);
    double d = dist(f, q);
    if (d < best.distance) best = {static_cast<int>(i), f, d};
  }
  return best;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
  os << ")";
  for (const auto& h : holes_) os << "-B((" << h.center.x << "," << h.center.y << ")," << h.radius << ")";
  return os.str();
}

double curvature_at(const Domain& d, Vec2 xbar, double tol) {
  auto nb = d.nearest_boundary(xbar);
  if (nb.piece < 0 || nb.distance > tol * std::max(1.0, d.diameter()))
    fail(ErrorCode::NotOnBoundary, "point is not on the boundary");
  const auto& pc = d.pieces()[nb.piece];
  if (pc.tag != BoundaryTag::Physical) fail(ErrorCode::NotOnBoundary, "point lies on an artificial edge");
  return pc.curvature;
}

}  // namespace vortex
