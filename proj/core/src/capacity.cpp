#include "vortex/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vortex/error.hpp"
#include "vortex/grid_field.hpp"

namespace vortex {

double elliptic_K(double gamma) {
  if (!(gamma >= 0 && gamma < 1)) fail(ErrorCode::ModulusOutOfRange, "elliptic modulus must lie in [0, 1)");
  double a = 1.0, b = std::sqrt((1 - gamma) * (1 + gamma));
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return kPi / (a + b);
}

SegmentRayCapacity capacity_segment_ray(double s) {
  if (!(s > 0) || !std::isfinite(s)) fail(ErrorCode::NonPositiveS, "segment–ray gap s must be positive");
  SegmentRayCapacity r;
  r.s = s;
  r.capa = 2 * elliptic_K(std::sqrt(1 / (1 + s))) / elliptic_K(std::sqrt(s / (1 + s)));
  r.lhs = kTwoPi / r.capa;
  r.bound = std::log(16 * (1 + s));
  r.bound_ok = r.lhs <= r.bound;
  return r;
}

CompactSet CompactSet::disc(Vec2 c, double r) {
  if (!(r > 0)) fail(ErrorCode::InvalidGeometry, "plate radius must be positive");
  CompactSet k;
  k.kind = Kind::Disc;
  k.center = c;
  k.radius = r;
  return k;
}

CompactSet CompactSet::rectangle(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x && hi.y > lo.y)) fail(ErrorCode::InvalidGeometry, "plate rectangle is empty");
  CompactSet k;
  k.kind = Kind::Rectangle;
  k.a = lo;
  k.b = hi;
  return k;
}

CompactSet CompactSet::segment(Vec2 a, Vec2 b) {
  if (a == b) fail(ErrorCode::InvalidGeometry, "degenerate segment");
  CompactSet k;
  k.kind = Kind::Segment;
  k.a = a;
  k.b = b;
  return k;
}

bool CompactSet::contains(Vec2 x, double h) const {
  const double tol = 1e-9 * std::max(h, diameter());
  switch (kind) {
    case Kind::Disc: return dist(x, center) <= radius + tol;
    case Kind::Rectangle: return x.x >= a.x - tol && x.x <= b.x + tol && x.y >= a.y - tol && x.y <= b.y + tol;
    case Kind::Segment: {
      Vec2 d = b - a;
      double t = std::clamp(dot(x - a, d) / norm2(d), 0.0, 1.0);
      return dist(x, a + t * d) < 0.5 * h;
    }
  }
  return false;
}

double CompactSet::area() const {
  switch (kind) {
    case Kind::Disc: return kPi * radius * radius;
    case Kind::Rectangle: return (b.x - a.x) * (b.y - a.y);
    case Kind::Segment: return 0.0;
  }
  return 0.0;
}

double CompactSet::diameter() const {
  return kind == Kind::Disc ? 2 * radius : dist(a, b);
}

double CompactSet::sup_norm2() const {
  switch (kind) {
    case Kind::Disc: {
      double r = norm(center) + radius;
      return r * r;
    }
    case Kind::Rectangle: {
      double m = 0;
      for (Vec2 c : {a, b, Vec2{a.x, b.y}, Vec2{b.x, a.y}}) m = std::max(m, norm2(c));
      return m;
    }
    case Kind::Segment: return std::max(norm2(a), norm2(b));
  }
  return 0.0;
}

std::vector<Vec2> CompactSet::outline(int n) const {
  std::vector<Vec2> pts;
  if (kind == Kind::Disc) {
    for (int i = 0; i < n; ++i) {
      double th = kTwoPi * i / n;
      pts.push_back(center + radius * Vec2{std::cos(th), std::sin(th)});
    }
    return pts;
  }
  std::vector<Vec2> corners = kind == Kind::Rectangle ? std::vector<Vec2>{a, {b.x, a.y}, b, {a.x, b.y}, a}
                                                       : std::vector<Vec2>{a, b};
  const int per = std::max(2, n / static_cast<int>(corners.size() - 1));
  for (std::size_t c = 0; c + 1 < corners.size(); ++c)
    for (int i = 0; i <= per; ++i) pts.push_back(corners[c] + (static_cast<double>(i) / per) * (corners[c + 1] - corners[c]));
  return pts;
}

std::string CompactSet::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Disc: os << "disc(c=(" << center.x << "," << center.y << "), r=" << radius << ")"; break;
    case Kind::Rectangle: os << "rect([" << a.x << "," << b.x << "]x[" << a.y << "," << b.y << "])"; break;
    case Kind::Segment: os << "segment((" << a.x << "," << a.y << ")-(" << b.x << "," << b.y << "))"; break;
  }
  return os.str();
}

CapacityResult capacity_numeric(const CapacitySpec& spec) {
  const Domain& om = spec.omega;
  const CompactSet& K = spec.K;
  const double h = spec.h;
  if (!(h > 0)) fail(ErrorCode::MeshTooCoarse, "mesh width must be positive");

  // nodes of K on the lattice of the grid
  std::vector<Vec2> knodes;
  {
    Box kb;
    if (K.kind == CompactSet::Kind::Disc) {
      kb = {K.center - Vec2{K.radius, K.radius}, K.center + Vec2{K.radius, K.radius}};
    } else {
      kb = {{std::min(K.a.x, K.b.x), std::min(K.a.y, K.b.y)}, {std::max(K.a.x, K.b.x), std::max(K.a.y, K.b.y)}};
    }
    Vec2 an = om.anchor();
    const int i0 = static_cast<int>(std::floor((kb.lo.x - an.x) / h)) - 1, i1 = static_cast<int>(std::ceil((kb.hi.x - an.x) / h)) + 1;
    const int j0 = static_cast<int>(std::floor((kb.lo.y - an.y) / h)) - 1, j1 = static_cast<int>(std::ceil((kb.hi.y - an.y) / h)) + 1;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        Vec2 x = an + Vec2{i * h, j * h};
        if (K.contains(x, h)) knodes.push_back(x);
      }
  }
  if (knodes.empty()) fail(ErrorCode::InvalidGeometry, "the plate captures no grid node");
  CapacityResult out;
  out.gap = std::numeric_limits<double>::infinity();
  for (Vec2 x : knodes) {
    if (!om.contains_strictly(x)) fail(ErrorCode::InvalidGeometry, "the plate is not inside the domain");
    out.gap = std::min(out.gap, om.distance_to_boundary(x));
  }
  if (out.gap < 4 * h) fail(ErrorCode::GapUnderResolved, "fewer than 4 mesh widths between the plate and ∂Ω");

  // discs and rectangles get cut arms at their edge; segments stay one node thick
  PlateLevel level;
  if (K.kind == CompactSet::Kind::Disc) {
    level = [&](Vec2 x) { return dist(x, K.center) - K.radius; };
  } else if (K.kind == CompactSet::Kind::Rectangle) {
    level = [&](Vec2 x) { return std::max({K.a.x - x.x, x.x - K.b.x, K.a.y - x.y, x.y - K.b.y}); };
  }
  auto grid = level ? Grid::build(om, h, {}, level) : Grid::build(om, h, [&](Vec2 x) { return K.contains(x, h); });
  const int pc = grid->plate_component();
  auto bn = grid->boundary_nodes();
  std::vector<double> bdata(bn.size(), 0.0);
  for (std::size_t b = 0; b < bn.size(); ++b)
    if (bn[b].component == pc) {
      bdata[b] = 1.0;
      ++out.plate_nodes;
    }
  PoissonSolver solver(grid, spec.method);
  std::vector<double> zero(grid->interior_count(), 0.0);
  GridField u = solver.solve(zero, bdata);
  out.unknowns = solver.unknowns();
  out.capa = dirichlet_energy(u);
  out.capa_form = dirichlet_form(u, u);
  return out;
}

double segment_ray_disc_halfwidth(double s) {
  if (!(s > 0)) fail(ErrorCode::NonPositiveS, "segment–ray gap s must be positive");
  // z ↦ √(s − z) ↦ (w − c)/(w + c), c = (s(1+s))^{1/4}: [−1,0] → [−t,t], [s,∞) → ∂B(0,1)
  const double c = std::pow(s * (1 + s), 0.25);
  const double w = std::sqrt(1 + s);
  return (w - c) / (w + c);
}

SegmentRayNumeric segment_ray_numeric(double s, double h) {
  SegmentRayNumeric r;
  r.s = s;
  r.t = segment_ray_disc_halfwidth(s);
  r.h = h > 0 ? h : std::min(0.01, r.t / 25);
  r.exact = capacity_segment_ray(s).capa;
  CapacitySpec spec;
  spec.omega = Domain::disc(1.0);
  spec.K = CompactSet::segment({-r.t, 0.0}, {r.t, 0.0});
  spec.h = r.h;
  spec.method = SolverMethod::Direct;  // fine grids; PCG is several times slower here
  r.numeric = capacity_numeric(spec).capa;
  r.rel_error = std::abs(r.numeric - r.exact) / r.exact;
  return r;
}

namespace {

double dist_to_boundary(const Domain& om, const CompactSet& K) {
  double d = std::numeric_limits<double>::infinity();
  for (Vec2 x : K.outline(1024)) d = std::min(d, om.distance_to_boundary(x));
  return d;
}

}  // namespace

BoundsReport check_capacity_bounds(double h, double capa_slack) {
  BoundsReport rep;
  rep.h = h;
  rep.capa_slack = capa_slack;

  auto run = [&](const std::string& name, const std::string& prop, const Domain& om, const CompactSet& K, double c,
                 double rhs) {
    CapacitySpec spec;
    spec.omega = om;
    spec.K = K;
    spec.h = h;
    BoundCheck chk;
    chk.name = name;
    chk.bound = prop;
    chk.capa = capacity_numeric(spec).capa;
    chk.lhs = c / chk.capa;
    chk.rhs = rhs;
    chk.slack = rhs - chk.lhs;
    chk.holds = c / (chk.capa * (1 + capa_slack)) <= rhs;
    if (!chk.holds) ++rep.violations;
    rep.checks.push_back(chk);
  };

  // 4π/capa ≤ log(μ(Ω)/μ(K))
  {
    auto meas = [&](const std::string& name, const Domain& om, const CompactSet& K) {
      run(name, "measure", om, K, 4 * kPi, std::log(om.area() / K.area()));
    };
    meas("concentric discs, area ratio 4", Domain::disc(1.0), CompactSet::disc({0, 0}, 0.5));
    meas("off-centre disc in unit disc", Domain::disc(1.0), CompactSet::disc({0.3, 0.1}, 0.2));
    meas("thin rectangle in rectangle", Domain::rectangle(-1, 1, -0.6, 0.6), CompactSet::rectangle({-0.4, -0.04}, {0.4, 0.04}));
  }
  // K in the half-plane x₁ > 0; the window is a subset, so its capacity is larger
  {
    const Domain om = Domain::half_plane_window(0.0, 4.0, 4.0);
    auto sup = [&](const std::string& name, const CompactSet& K) {
      run(name, "sup-norm", om, K, 4 * kPi, std::log(8 * kPi * K.sup_norm2() / K.area()));
    };
    sup("disc in half-plane window", CompactSet::disc({1.0, 0.0}, 0.3));
    sup("thin rectangle in half-plane window", CompactSet::rectangle({0.5, 0.2}, {1.5, 0.3}));
  }
  // complement connected, containing a ball of radius ρ (the obstacle)
  {
    const double rho = 0.5;
    const Domain om = Domain::disc_complement_window(rho, 3.0, 4.0);
    auto ball = [&](const std::string& name, const CompactSet& K) {
      const double d = dist_to_boundary(om, K);
      run(name, "obstacle-ball", om, K, kTwoPi, std::log(16 * (1 + d / (2 * rho)) * (1 + 2 * d / K.diameter())));
    };
    ball("thin rectangle near obstacle", CompactSet::rectangle({0.7, -0.03}, {1.3, 0.03}));
    ball("disc near obstacle", CompactSet::disc({1.2, 0.5}, 0.2));
  }
  // Ω' = R² ∖ B̄(0, r); the framed window Ω ⊂ Ω' has the larger capacity
  {
    const double r = 0.5;
    const Domain om = Domain::rectangle(-2, 2, -2, 2).with_hole({0, 0}, r);
    auto conn = [&](const std::string& name, const CompactSet& K) {
      double d = std::numeric_limits<double>::infinity();
      for (Vec2 x : K.outline(1024)) d = std::min(d, norm(x) - r);
      const double diamC = 2 * r, muC = kPi * r * r;
      run(name, "connected", om, K, kTwoPi,
          std::log(16 * (1 + kPi * d * diamC / (2 * muC)) * (1 + 2 * d / K.diameter())));
    };
    conn("thin rectangle near hole", CompactSet::rectangle({0.7, -0.03}, {1.3, 0.03}));
    conn("disc near hole", CompactSet::disc({-1.0, 0.8}, 0.2));
  }
  return rep;
}

}  // namespace vortex
