#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "vortex/poisson.hpp"

namespace vortex {

enum class GreenMode { Analytic, Numeric, Star, WholePlane };

struct KoebeData {
  std::vector<GridField> Z;   // harmonic measure of each hole
  Eigen::MatrixXd omega;      // ω_kh
  Eigen::MatrixXd omega_inv;  // ω^kh
  double condition = 0;
};

// Green function of −Δ with Dirichlet data: analytic kernels for the disc, the half plane
// and the half plane minus a disc (Turkington), numeric otherwise; the Koebe-modified
// kernel G_* for multiply-connected domains; the free-space kernel for the whole plane.
class GreenEvaluator {
 public:
  static bool has_analytic(const Domain& d);
  static std::shared_ptr<const GreenEvaluator> analytic(const Domain& d);
  static std::shared_ptr<const GreenEvaluator> numeric(std::shared_ptr<const PoissonSolver> solver);
  static std::shared_ptr<const GreenEvaluator> whole_plane();
  // analytic when available, numeric otherwise
  static std::shared_ptr<const GreenEvaluator> best(const Domain& d, std::shared_ptr<const PoissonSolver> solver);

  GreenMode mode() const { return mode_; }
  bool bounded() const { return mode_ != GreenMode::WholePlane; }
  const Domain& domain() const;
  const PoissonSolver* solver() const { return solver_.get(); }
  const KoebeData* koebe() const { return koebe_.get(); }

  // interior point where the kernel may be evaluated
  bool admissible(Vec2 x) const;

  double green(Vec2 x, Vec2 y) const;
  double regular(Vec2 x, Vec2 y) const;  // H(x,y) = G(x,y) − (1/2π) log(1/|x−y|)
  double robin(Vec2 x) const;            // H(x,x)

  Vec2 grad_green(Vec2 x, Vec2 y) const;  // ∇_x G(x,y)
  Vec2 grad_robin(Vec2 x) const;          // ∇ of x ↦ H(x,x)

  // numeric mode: G(·, y_node) for the interior node with index k (cached)
  std::shared_ptr<const GridField> source_field(std::size_t k) const;
  // numeric mode: H at an interior node, from lattice-corrected offsets h and 2h
  double nodal_robin(std::size_t k) const;

  // G_*(·, y) as a grid field (star mode) or G(·, y) (numeric mode), y an interior node
  GridField kernel_field(std::size_t k) const;

  friend std::shared_ptr<const GreenEvaluator> koebe_assemble(std::shared_ptr<const PoissonSolver> solver);

 private:
  GreenEvaluator() = default;
  double numeric_green(Vec2 x, Vec2 y) const;
  double numeric_robin(Vec2 x) const;
  double star_correction(Vec2 x, Vec2 y) const;
  void check(Vec2 x) const;

  GreenMode mode_ = GreenMode::Analytic;
  std::shared_ptr<const Domain> domain_;
  std::shared_ptr<const PoissonSolver> solver_;
  std::shared_ptr<const KoebeData> koebe_;
  double fd_step_ = 1e-5;

  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::shared_ptr<const GridField>> fields_;
  mutable std::map<std::size_t, double> robin_cache_;
};

// Harmonic measures Z_k, their Gram matrix ω and the kernel G_* = G + Σ Z_k ω^kh Z_h.
// The solver must impose Dirichlet data on every component (no floating components).
std::shared_ptr<const GreenEvaluator> koebe_assemble(std::shared_ptr<const PoissonSolver> solver);

// largest |discrete flux| of G_*(·, y) through a hole, relative to the unit source mass
double koebe_flux_defect(const GreenEvaluator& star, std::size_t source_node);

struct BoundaryExpansion {
  double curvature = 0;
  double predicted = 0;  // −K|x|²/(4π x₁)
  std::vector<double> eps;
  std::vector<double> r;
  double limit = 0;      // linear extrapolation of r(ε) to ε = 0
};

// r(ε) = [H(x̄+εx, x̄+εx) − (1/2π) log(2εx₁)] / ε, x given in local coordinates
// (x₁ along the inward normal, x₂ tangential).
BoundaryExpansion boundary_h_expansion(const GreenEvaluator& ge, Vec2 xbar, Vec2 x, const std::vector<double>& eps);

}  // namespace vortex
