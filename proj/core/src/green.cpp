#include "vortex/green.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "vortex/error.hpp"

namespace vortex {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);
constexpr double kEulerGamma = 0.57721566490153286;
// potential kernel of the simple random walk on Z²: a(0)=0, a(e1)=1, a(2e1)=4−8/π,
// a(x) = (2/π) log|x| + (2γ + log 8)/π + O(|x|⁻²)
const double kLatticeA[3] = {0.0, 1.0, 4.0 - 8.0 / kPi};
const double kLatticeC0 = (2 * kEulerGamma + std::log(8.0)) / kPi;

}  // namespace

bool GreenEvaluator::has_analytic(const Domain& d) {
  if (!d.holes().empty()) return false;
  return d.kind() == DomainKind::Disc || d.kind() == DomainKind::HalfPlaneWindow ||
         d.kind() == DomainKind::DiscComplementWindow;
}

std::shared_ptr<const GreenEvaluator> GreenEvaluator::analytic(const Domain& d) {
  if (!has_analytic(d)) fail(ErrorCode::UnsupportedKind, "no closed-form Green function for " + d.describe());
  std::shared_ptr<GreenEvaluator> g(new GreenEvaluator);
  g->mode_ = GreenMode::Analytic;
  g->domain_ = std::make_shared<Domain>(d);
  g->fd_step_ = 1e-5 * d.diameter();
  return g;
}

std::shared_ptr<const GreenEvaluator> GreenEvaluator::numeric(std::shared_ptr<const PoissonSolver> solver) {
  if (!solver->floating().empty()) fail(ErrorCode::InvalidSpec, "numeric Green function needs plain Dirichlet data");
  std::shared_ptr<GreenEvaluator> g(new GreenEvaluator);
  g->mode_ = GreenMode::Numeric;
  g->domain_ = std::make_shared<Domain>(solver->grid().domain());
  g->solver_ = std::move(solver);
  g->fd_step_ = 1e-5 * g->domain_->diameter();
  return g;
}

std::shared_ptr<const GreenEvaluator> GreenEvaluator::whole_plane() {
  std::shared_ptr<GreenEvaluator> g(new GreenEvaluator);
  g->mode_ = GreenMode::WholePlane;
  return g;
}

std::shared_ptr<const GreenEvaluator> GreenEvaluator::best(const Domain& d, std::shared_ptr<const PoissonSolver> solver) {
  if (has_analytic(d)) return analytic(d);
  if (!solver) fail(ErrorCode::UnsupportedKind, "numeric Green function needs a grid");
  return numeric(std::move(solver));
}

const Domain& GreenEvaluator::domain() const {
  if (!domain_) fail(ErrorCode::UnsupportedKind, "whole-plane kernel has no domain");
  return *domain_;
}

bool GreenEvaluator::admissible(Vec2 x) const {
  switch (mode_) {
    case GreenMode::WholePlane: return std::isfinite(x.x) && std::isfinite(x.y);
    case GreenMode::Analytic: {
      const auto& p = domain_->params();
      switch (domain_->kind()) {
        case DomainKind::Disc: return norm(x - domain_->anchor()) < p[0];
        case DomainKind::HalfPlaneWindow: return x.x > p[0];
        case DomainKind::DiscComplementWindow: return x.x > 0 && norm(x) > p[0];
        default: return false;
      }
    }
    case GreenMode::Numeric:
    case GreenMode::Star: {
      if (!domain_->contains(x) || domain_->distance_to_boundary(x) <= 0) return false;
      const Grid& G = solver_->grid();
      auto c = G.cell_of(x);
      for (int dj = 0; dj < 2; ++dj)
        for (int di = 0; di < 2; ++di)
          if (G.interior_id(c[0] + di, c[1] + dj) >= 0) return true;
      return false;
    }
  }
  return false;
}

void GreenEvaluator::check(Vec2 x) const {
  if (!admissible(x)) fail(ErrorCode::OutsideDomain, "evaluation point outside the domain");
}

double GreenEvaluator::green(Vec2 x, Vec2 y) const {
  check(x);
  check(y);
  const double r2 = norm2(x - y);
  if (r2 == 0.0) fail(ErrorCode::CoincidentPoints, "G(x,x) is singular");
  switch (mode_) {
    case GreenMode::WholePlane: return -kInv4Pi * std::log(r2);
    case GreenMode::Numeric: return numeric_green(x, y);
    case GreenMode::Star: return numeric_green(x, y) + star_correction(x, y);
    case GreenMode::Analytic: break;
  }
  const auto& p = domain_->params();
  switch (domain_->kind()) {
    case DomainKind::Disc: {
      const double R2 = p[0] * p[0];
      Vec2 a = x - domain_->anchor(), b = y - domain_->anchor();
      return kInv4Pi * std::log1p((R2 - norm2(a)) * (R2 - norm2(b)) / (R2 * r2));
    }
    case DomainKind::HalfPlaneWindow: {
      double x1 = x.x - p[0], y1 = y.x - p[0];
      return kInv4Pi * std::log1p(4 * x1 * y1 / r2);
    }
    case DomainKind::DiscComplementWindow: {
      const double R2 = p[0] * p[0];
      double prod = x.x * y.x;
      double D = std::pow(dot(x, y) - R2, 2) + std::pow(cross(x, y), 2);
      return kInv4Pi * (std::log1p(4 * prod / r2) - std::log1p(4 * R2 * prod / D));
    }
    default: break;
  }
  fail(ErrorCode::UnsupportedKind, "no kernel");
}

double GreenEvaluator::regular(Vec2 x, Vec2 y) const {
  check(x);
  check(y);
  const double r2 = norm2(x - y);
  switch (mode_) {
    case GreenMode::WholePlane: return 0.0;
    case GreenMode::Numeric:
    case GreenMode::Star: {
      const double h = solver_->grid().h();
      double base = r2 < 9 * h * h ? numeric_robin(0.5 * (x + y)) : numeric_green(x, y) + kInv4Pi * std::log(r2);
      return mode_ == GreenMode::Star ? base + star_correction(x, y) : base;
    }
    case GreenMode::Analytic: break;
  }
  const auto& p = domain_->params();
  switch (domain_->kind()) {
    case DomainKind::Disc: {
      const double R2 = p[0] * p[0];
      Vec2 a = x - domain_->anchor(), b = y - domain_->anchor();
      return kInv4Pi * std::log(norm2(a) * norm2(b) / R2 - 2 * dot(a, b) + R2);
    }
    case DomainKind::HalfPlaneWindow: {
      double x1 = x.x - p[0], y1 = y.x - p[0];
      return kInv4Pi * std::log(r2 + 4 * x1 * y1);
    }
    case DomainKind::DiscComplementWindow: {
      const double R2 = p[0] * p[0];
      double prod = x.x * y.x;
      double D = std::pow(dot(x, y) - R2, 2) + std::pow(cross(x, y), 2);
      return kInv4Pi * (std::log(r2 + 4 * prod) - std::log1p(4 * R2 * prod / D));
    }
    default: break;
  }
  fail(ErrorCode::UnsupportedKind, "no kernel");
}

double GreenEvaluator::robin(Vec2 x) const {
  if (mode_ == GreenMode::WholePlane) fail(ErrorCode::UndefinedRobin, "the whole plane has no Robin function");
  check(x);
  if (mode_ == GreenMode::Numeric) return numeric_robin(x);
  if (mode_ == GreenMode::Star) return numeric_robin(x) + star_correction(x, x);
  const auto& p = domain_->params();
  switch (domain_->kind()) {
    case DomainKind::Disc: {
      const double R = p[0];
      return 2 * kInv4Pi * std::log((R * R - norm2(x - domain_->anchor())) / R);
    }
    case DomainKind::HalfPlaneWindow: return 2 * kInv4Pi * std::log(2 * (x.x - p[0]));
    case DomainKind::DiscComplementWindow: {
      const double R2 = p[0] * p[0];
      double s = norm2(x) - R2;
      return kInv4Pi * (std::log(4 * x.x * x.x) - std::log1p(4 * R2 * x.x * x.x / (s * s)));
    }
    default: break;
  }
  fail(ErrorCode::UnsupportedKind, "no kernel");
}

Vec2 GreenEvaluator::grad_green(Vec2 x, Vec2 y) const {
  check(x);
  check(y);
  const Vec2 d = x - y;
  const double r2 = norm2(d);
  if (r2 == 0.0) fail(ErrorCode::CoincidentPoints, "gradient at the pole");
  if (mode_ == GreenMode::WholePlane) return -2 * kInv4Pi * d / r2;
  if (mode_ == GreenMode::Analytic && domain_->kind() == DomainKind::Disc) {
    const double R2 = domain_->params()[0] * domain_->params()[0];
    Vec2 a = x - domain_->anchor(), b = y - domain_->anchor();
    double N = norm2(a) * norm2(b) / R2 - 2 * dot(a, b) + R2;
    Vec2 dN = 2 * norm2(b) / R2 * a - 2 * b;
    return kInv4Pi * (dN / N - 2 * d / r2);
  }
  if (mode_ == GreenMode::Analytic && domain_->kind() == DomainKind::HalfPlaneWindow) {
    const double a0 = domain_->params()[0];
    double x1 = x.x - a0, y1 = y.x - a0;
    double N = r2 + 4 * x1 * y1;
    Vec2 dN = 2 * d + Vec2{4 * y1, 0};
    return kInv4Pi * (dN / N - 2 * d / r2);
  }
  const double s = fd_step_;
  return {(green(x + Vec2{s, 0}, y) - green(x - Vec2{s, 0}, y)) / (2 * s),
          (green(x + Vec2{0, s}, y) - green(x - Vec2{0, s}, y)) / (2 * s)};
}

Vec2 GreenEvaluator::grad_robin(Vec2 x) const {
  check(x);
  if (mode_ == GreenMode::Analytic && domain_->kind() == DomainKind::Disc) {
    const double R2 = domain_->params()[0] * domain_->params()[0];
    Vec2 a = x - domain_->anchor();
    return -4 * kInv4Pi * a / (R2 - norm2(a));
  }
  if (mode_ == GreenMode::Analytic && domain_->kind() == DomainKind::HalfPlaneWindow)
    return {2 * kInv4Pi / (x.x - domain_->params()[0]), 0.0};
  const double s = fd_step_;
  return {(robin(x + Vec2{s, 0}) - robin(x - Vec2{s, 0})) / (2 * s),
          (robin(x + Vec2{0, s}) - robin(x - Vec2{0, s})) / (2 * s)};
}

std::shared_ptr<const GridField> GreenEvaluator::source_field(std::size_t k) const {
  if (!solver_) fail(ErrorCode::UnsupportedKind, "source fields exist in numeric mode only");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = fields_.find(k);
    if (it != fields_.end()) return it->second;
  }
  const Grid& G = solver_->grid();
  std::vector<double> rhs(G.interior_count(), 0.0);
  rhs.at(k) = 1.0 / (G.h() * G.h());
  auto f = std::make_shared<const GridField>(solver_->solve(rhs));
  std::lock_guard<std::mutex> lock(mu_);
  if (fields_.size() > 512) fields_.erase(fields_.begin());
  fields_.emplace(k, f);
  return f;
}

double GreenEvaluator::numeric_green(Vec2 x, Vec2 y) const {
  const Grid& G = solver_->grid();
  auto c = G.cell_of(y);
  Vec2 o = G.node(c[0], c[1]);
  double tx = std::clamp((y.x - o.x) / G.h(), 0.0, 1.0), ty = std::clamp((y.y - o.y) / G.h(), 0.0, 1.0);
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
  double acc = 0, wsum = 0;
  for (int s = 0; s < 4; ++s) {
    int i = c[0] + di[s], j = c[1] + dj[s];
    int k = G.interior_id(i, j);
    if (k >= 0) {
      acc += w[s] * source_field(k)->sample(x);
      wsum += w[s];
    } else if (G.boundary_id(i, j) >= 0) {
      wsum += w[s];  // G vanishes for a source on the boundary
    }
  }
  if (wsum <= 0) fail(ErrorCode::OutsideDomain, "source point outside the grid");
  return acc / wsum;
}

double GreenEvaluator::nodal_robin(std::size_t k) const {
  if (!solver_) fail(ErrorCode::UnsupportedKind, "nodal Robin values exist in numeric mode only");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = robin_cache_.find(k);
    if (it != robin_cache_.end()) return it->second;
  }
  const Grid& G = solver_->grid();
  std::shared_ptr<const GridField> f;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = fields_.find(k);
    if (it != fields_.end()) f = it->second;
  }
  if (!f) {
    std::vector<double> rhs(G.interior_count(), 0.0);
    rhs[k] = 1.0 / (G.h() * G.h());
    f = std::make_shared<const GridField>(solver_->solve(rhs));
  }
  const auto n = G.interior_nodes()[k];
  const double shift = -2 * kInv4Pi * std::log(1.0 / G.h()) - kLatticeC0 / 4;
  auto est = [&](int off, int axis) {
    int di = axis == 0 ? off : 0, dj = axis == 1 ? off : 0;
    double a = f->at(n.i + di, n.j + dj), b = f->at(n.i - di, n.j - dj);
    return 0.5 * (a + b) + kLatticeA[off] / 4 + shift;
  };
  double h1 = 0, h2 = 0;
  int axes = 0;
  for (int axis = 0; axis < 2; ++axis) {
    double e1 = est(1, axis), e2 = est(2, axis);
    if (std::isnan(e1) || std::isnan(e2)) continue;
    h1 += e1;
    h2 += e2;
    ++axes;
  }
  double H;
  if (axes > 0) {
    // offsets h and 2h; what is left of the lattice correction is O(r²)
    H = (4 * h1 - h2) / (3 * axes);
  } else {
    H = f->interior()[k] + shift;  // a(0) = 0
  }
  std::lock_guard<std::mutex> lock(mu_);
  robin_cache_.emplace(k, H);
  return H;
}

double GreenEvaluator::numeric_robin(Vec2 x) const {
  const Grid& G = solver_->grid();
  auto c = G.cell_of(x);
  Vec2 o = G.node(c[0], c[1]);
  double tx = std::clamp((x.x - o.x) / G.h(), 0.0, 1.0), ty = std::clamp((x.y - o.y) / G.h(), 0.0, 1.0);
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
  double acc = 0, wsum = 0;
  for (int s = 0; s < 4; ++s) {
    int k = G.interior_id(c[0] + di[s], c[1] + dj[s]);
    if (k < 0) continue;
    acc += w[s] * nodal_robin(k);
    wsum += w[s];
  }
  if (wsum <= 0) fail(ErrorCode::OutsideDomain, "Robin function requested outside the interior nodes");
  return acc / wsum;
}

double GreenEvaluator::star_correction(Vec2 x, Vec2 y) const {
  const auto& K = *koebe_;
  const int m = static_cast<int>(K.Z.size());
  Eigen::VectorXd zx(m), zy(m);
  for (int k = 0; k < m; ++k) {
    zx[k] = K.Z[k].sample(x);
    zy[k] = K.Z[k].sample(y);
  }
  return zx.dot(K.omega_inv * zy);
}

GridField GreenEvaluator::kernel_field(std::size_t k) const {
  GridField f = *source_field(k);
  if (mode_ != GreenMode::Star) return f;
  const auto& K = *koebe_;
  const int m = static_cast<int>(K.Z.size());
  Eigen::VectorXd zy(m);
  for (int h = 0; h < m; ++h) zy[h] = K.Z[h].interior()[k];
  Eigen::VectorXd c = K.omega_inv * zy;
  for (int h = 0; h < m; ++h) {
    for (std::size_t i = 0; i < f.interior().size(); ++i) f.interior()[i] += c[h] * K.Z[h].interior()[i];
    for (std::size_t i = 0; i < f.boundary().size(); ++i) f.boundary()[i] += c[h] * K.Z[h].boundary()[i];
  }
  return f;
}

std::shared_ptr<const GreenEvaluator> koebe_assemble(std::shared_ptr<const PoissonSolver> solver) {
  const Grid& G = solver->grid();
  const int m = G.domain().hole_count();
  if (m < 1) fail(ErrorCode::InvalidSpec, "Koebe construction needs at least one hole");
  if (!solver->floating().empty()) fail(ErrorCode::InvalidSpec, "Koebe construction needs plain Dirichlet data");

  auto K = std::make_shared<KoebeData>();
  std::vector<double> zero(G.interior_count(), 0.0);
  auto bn = G.boundary_nodes();
  for (int k = 1; k <= m; ++k) {
    std::vector<double> bd(bn.size(), 0.0);
    for (std::size_t i = 0; i < bn.size(); ++i) bd[i] = bn[i].component == k ? 1.0 : 0.0;
    K->Z.push_back(solver->solve(zero, bd));
  }
  K->omega.resize(m, m);
  for (int k = 0; k < m; ++k)
    for (int h = k; h < m; ++h) K->omega(k, h) = K->omega(h, k) = dirichlet_form(K->Z[k], K->Z[h]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K->omega);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  K->condition = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0) || K->condition > 1e12) fail(ErrorCode::SingularOmegaMatrix, "ω matrix is singular");
  K->omega_inv = K->omega.inverse();

  std::shared_ptr<GreenEvaluator> g(new GreenEvaluator);
  g->mode_ = GreenMode::Star;
  g->domain_ = std::make_shared<Domain>(G.domain());
  g->solver_ = std::move(solver);
  g->koebe_ = std::move(K);
  g->fd_step_ = 1e-5 * g->domain_->diameter();
  return g;
}

double koebe_flux_defect(const GreenEvaluator& star, std::size_t source_node) {
  GridField f = star.kernel_field(source_node);
  const int m = star.domain().hole_count();
  double worst = 0;
  for (int c = 1; c <= m; ++c) worst = std::max(worst, std::abs(component_flux(f, c)));
  return worst;
}

BoundaryExpansion boundary_h_expansion(const GreenEvaluator& ge, Vec2 xbar, Vec2 x, const std::vector<double>& eps) {
  const Domain& d = ge.domain();
  if (!(x.x > 0)) fail(ErrorCode::InvalidSpec, "probe must point into the domain (x1 > 0)");
  if (eps.empty()) fail(ErrorCode::InsufficientPoints, "no ε values");
  BoundaryExpansion out;
  out.curvature = curvature_at(d, xbar);
  out.predicted = -out.curvature * norm2(x) / (4 * kPi * x.x);
  auto nb = d.nearest_boundary(xbar);
  Vec2 n = d.pieces()[nb.piece].inward_normal(nb.point);
  Vec2 t{-n.y, n.x};
  for (double e : eps) {
    Vec2 p = xbar + e * (x.x * n + x.y * t);
    double r = (ge.robin(p) - std::log(2 * e * x.x) / kTwoPi) / e;
    out.eps.push_back(e);
    out.r.push_back(r);
  }
  out.limit = out.r.back();
  if (eps.size() >= 2) {
    // r(ε) = r0 + c ε + o(ε): extrapolate with the two smallest ε
    std::size_t a = 0, b = 1;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (eps[i] < eps[a]) a = i;
    b = a == 0 ? 1 : 0;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (i != a && eps[i] < eps[b]) b = i;
    out.limit = (eps[b] * out.r[a] - eps[a] * out.r[b]) / (eps[b] - eps[a]);
  }
  return out;
}

}  // namespace vortex
