#include "vortex/poisson.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <utility>

#include "vortex/error.hpp"

namespace vortex {

struct PoissonSolver::Impl {
  Eigen::SimplicialLDLT<SparseMatrix> direct;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
};

PoissonSolver::PoissonSolver(std::shared_ptr<const Grid> g, SolverMethod method, std::vector<int> floating)
    : grid_(std::move(g)), method_(method), floating_(std::move(floating)), impl_(std::make_unique<Impl>()) {
  const Grid& G = *grid_;
  float_slot_.assign(G.component_count(), -1);
  for (std::size_t f = 0; f < floating_.size(); ++f) {
    int c = floating_[f];
    if (c <= 0 || c >= G.component_count())
      fail(ErrorCode::InvalidSpec, "only inner boundary components can float");
    float_slot_[c] = static_cast<int>(f);
  }
  const std::size_t n_int = G.interior_count();
  const double ih2 = 1.0 / (G.h() * G.h());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * n_int + 4 * G.boundary_count());
  auto bn = G.boundary_nodes();
  for (std::size_t k = 0; k < n_int; ++k) {
    const auto& nb = G.neighbours(k);
    const auto& arm = G.arms(k);
    double diag = 0;
    for (int s = 0; s < 4; ++s) {
      // symmetric cut-cell stencil: a boundary arm of length θh weighs 1/θ
      const double w = ih2 / arm[s];
      diag += w;
      if (nb[s] >= 0) {
        t.emplace_back(k, nb[s], -ih2);
        continue;
      }
      int f = float_slot_[bn[-nb[s] - 1].component];
      if (f < 0) continue;
      const std::size_t row = n_int + f;
      t.emplace_back(k, row, -w);
      t.emplace_back(row, k, -w);
      t.emplace_back(row, row, w);
    }
    t.emplace_back(k, k, diag);
  }
  const std::size_t n = unknowns();
  A_.resize(n, n);
  A_.setFromTriplets(t.begin(), t.end());
  A_.makeCompressed();
  if (method_ == SolverMethod::Direct) {
    impl_->direct.compute(A_);
    if (impl_->direct.info() != Eigen::Success) fail(ErrorCode::SolverDiverged, "sparse factorisation failed");
  } else {
    impl_->cg.setTolerance(1e-10);
    impl_->cg.setMaxIterations(static_cast<int>(50 * std::sqrt(static_cast<double>(n))));
    impl_->cg.compute(A_);
    if (impl_->cg.info() != Eigen::Success) fail(ErrorCode::SolverDiverged, "preconditioner setup failed");
  }
}

PoissonSolver::~PoissonSolver() = default;

Eigen::VectorXd PoissonSolver::injection(std::span<const double> bdata) const {
  const Grid& G = *grid_;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns());
  if (bdata.empty()) return b;
  if (bdata.size() != G.boundary_count()) fail(ErrorCode::DimensionMismatch, "boundary data size");
  const double ih2 = 1.0 / (G.h() * G.h());
  auto bn = G.boundary_nodes();
  const std::size_t n_int = G.interior_count();
  for (std::size_t k = 0; k < n_int; ++k)
    for (int s = 0; s < 4; ++s) {
      const int nb = G.neighbours(k)[s];
      if (nb >= 0) continue;
      const std::size_t bi = -nb - 1;
      const double w = ih2 / G.arms(k)[s];
      b[k] += bdata[bi] * w;
      int f = float_slot_[bn[bi].component];
      if (f >= 0) b[n_int + f] -= bdata[bi] * w;
    }
  return b;
}

Eigen::VectorXd PoissonSolver::solve_raw(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x;
  if (method_ == SolverMethod::Direct) {
    x = impl_->direct.solve(b);
    last_iterations_ = 1;
  } else {
    x = impl_->cg.solve(b);
    last_iterations_ = static_cast<int>(impl_->cg.iterations());
    if (impl_->cg.info() != Eigen::Success) fail(ErrorCode::SolverDiverged, "conjugate gradient hit the iteration cap");
  }
  double bn = b.norm();
  last_residual_ = bn > 0 ? (A_ * x - b).norm() / bn : (A_ * x).norm();
  return x;
}

GridField PoissonSolver::solve(std::span<const double> rhs, std::span<const double> bdata,
                               std::span<const double> flux) const {
  const Grid& G = *grid_;
  const std::size_t n_int = G.interior_count();
  if (rhs.size() != n_int) fail(ErrorCode::DimensionMismatch, "rhs size");
  if (!flux.empty() && flux.size() != floating_.size()) fail(ErrorCode::DimensionMismatch, "flux size");
  Eigen::VectorXd b = injection(bdata);
  for (std::size_t k = 0; k < n_int; ++k) b[k] += rhs[k];
  const double ih2 = 1.0 / (G.h() * G.h());
  for (std::size_t f = 0; f < flux.size(); ++f) b[n_int + f] += flux[f] * ih2;
  Eigen::VectorXd x = solve_raw(b);

  GridField u(grid_);
  for (std::size_t k = 0; k < n_int; ++k) u.interior()[k] = x[k];
  auto bn = G.boundary_nodes();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    double g = bdata.empty() ? 0.0 : bdata[i];
    int f = float_slot_[bn[i].component];
    u.boundary()[i] = f >= 0 ? g + x[n_int + f] : g;
  }
  return u;
}

std::vector<double> PoissonSolver::floating_values(const GridField& u) const {
  std::vector<double> sum(floating_.size(), 0.0), cnt(floating_.size(), 0.0);
  auto bn = grid_->boundary_nodes();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    int f = float_slot_[bn[i].component];
    if (f < 0) continue;
    sum[f] += u.boundary()[i];
    cnt[f] += 1;
  }
  for (std::size_t f = 0; f < sum.size(); ++f) sum[f] /= std::max(cnt[f], 1.0);
  return sum;
}

std::vector<double> neg_laplacian(const GridField& u) {
  const Grid& G = u.grid();
  const double ih2 = 1.0 / (G.h() * G.h());
  std::vector<double> out(G.interior_count());
  const auto& in = u.interior();
  const auto& bd = u.boundary();
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0;
    for (int a = 0; a < 4; ++a) {
      const int nb = G.neighbours(k)[a];
      s += (in[k] - (nb >= 0 ? in[nb] : bd[-nb - 1])) / G.arms(k)[a];
    }
    out[k] = s * ih2;
  }
  return out;
}

double dirichlet_energy(const GridField& u) {
  // the operator form covers every arm leaving an interior node; edges running along a
  // grid-aligned boundary (both ends shared boundary nodes) add their half-cell share
  const Grid& G = u.grid();
  double e = dirichlet_form(u, u);
  for (const auto& b : G.boundary_nodes()) {
    const int k = G.boundary_id(b.i, b.j);
    if (k < 0) continue;
    for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const int m = G.boundary_id(b.i + di, b.j + dj);
      if (m < 0) continue;
      const double d = u.boundary()[k] - u.boundary()[m];
      e += 0.5 * d * d;
    }
  }
  return e;
}

double dirichlet_form(const GridField& u, const GridField& v) {
  const Grid& G = u.grid();
  if (&G != &v.grid()) fail(ErrorCode::DimensionMismatch, "fields live on different grids");
  double s = 0;
  for (std::size_t k = 0; k < G.interior_count(); ++k) {
    const auto& nbs = G.neighbours(k);
    for (int a = 0; a < 4; ++a) {
      const int nb = nbs[a];
      if (nb >= 0) {
        if (static_cast<std::size_t>(nb) < k) continue;
        s += (u.interior()[k] - u.interior()[nb]) * (v.interior()[k] - v.interior()[nb]);
      } else {
        std::size_t b = -nb - 1;
        s += (u.interior()[k] - u.boundary()[b]) * (v.interior()[k] - v.boundary()[b]) / G.arms(k)[a];
      }
    }
  }
  return s;
}

double component_flux(const GridField& u, int component) {
  const Grid& G = u.grid();
  auto bn = G.boundary_nodes();
  double s = 0;
  for (std::size_t k = 0; k < G.interior_count(); ++k)
    for (int a = 0; a < 4; ++a) {
      const int nb = G.neighbours(k)[a];
      if (nb < 0 && bn[-nb - 1].component == component) s += (u.boundary()[-nb - 1] - u.interior()[k]) / G.arms(k)[a];
    }
  return s;
}

Vec2 gradient_at(const GridField& u, Vec2 p) {
  const double h = u.grid().h();
  return {(u.sample(p + Vec2{h, 0}) - u.sample(p - Vec2{h, 0})) / (2 * h),
          (u.sample(p + Vec2{0, h}) - u.sample(p - Vec2{0, h})) / (2 * h)};
}

}  // namespace vortex
