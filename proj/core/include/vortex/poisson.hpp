#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <span>
#include <vector>

#include "vortex/grid_field.hpp"

namespace vortex {

enum class SolverMethod { Direct, Pcg };

using SparseMatrix = Eigen::SparseMatrix<double>;

// 5-point −Δ on the interior nodes of a grid with Dirichlet data on the boundary nodes.
// Arms cut by the boundary use the symmetric cut-cell weight 1/θ (θh = arm length), which
// keeps the matrix SPD and the solution second-order accurate.
//
// Boundary components listed as `floating` carry an unknown constant added to their
// boundary data, closed by a zero-net-flux row; this is the constraint of the
// multiply-connected problem and of prescribed circulations.
class PoissonSolver {
 public:
  explicit PoissonSolver(std::shared_ptr<const Grid> g, SolverMethod method = SolverMethod::Direct,
                         std::vector<int> floating = {});
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  SolverMethod method() const { return method_; }
  const std::vector<int>& floating() const { return floating_; }
  std::size_t unknowns() const { return grid_->interior_count() + floating_.size(); }

  // interior rows first, then one row per floating component
  const SparseMatrix& matrix() const { return A_; }

  // rhs on interior nodes; bdata on boundary nodes (may be empty = zero);
  // flux[f] is the prescribed net flux Σ(u_b − u_i)/θ through floating component f.
  GridField solve(std::span<const double> rhs, std::span<const double> bdata = {},
                  std::span<const double> flux = {}) const;

  // raw solve with the assembled matrix
  Eigen::VectorXd solve_raw(const Eigen::VectorXd& b) const;

  // injection of boundary data into the interior rows (the b − A u contribution)
  Eigen::VectorXd injection(std::span<const double> bdata) const;

  // values of the floating constants inside a solved field (mean over the component)
  std::vector<double> floating_values(const GridField& u) const;

  // ||A u − rhs − injection|| / ||rhs|| of the last solve, for diagnostics
  double last_relative_residual() const { return last_residual_; }
  int last_iterations() const { return last_iterations_; }

 private:
  struct Impl;
  std::shared_ptr<const Grid> grid_;
  SolverMethod method_;
  std::vector<int> floating_;
  std::vector<int> float_slot_;  // component -> floating index or -1
  SparseMatrix A_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0;
  mutable int last_iterations_ = 0;
};

// discrete −Δu at interior nodes
std::vector<double> neg_laplacian(const GridField& u);

// Discrete ∫|∇u|² (no ½ prefactor): dirichlet_form(u, u) plus the half-cell share of edges
// running along grid-aligned boundaries, so that it is exact for linear u on rectangles.
double dirichlet_energy(const GridField& u);

// Bilinear form of the 5-point operator, Σ over edges touching an interior node of
// (u_i − u_j)(v_i − v_j), boundary arms weighted by 1/θ. Equals h² uᵀAv for zero boundary data; it is the energy the
// discrete equations are the Euler–Lagrange equations of.
double dirichlet_form(const GridField& u, const GridField& v);

// Net discrete flux Σ(u_b − u_i)/θ through the boundary nodes of one component (outward from Ω).
double component_flux(const GridField& u, int component);

Vec2 gradient_at(const GridField& u, Vec2 p);

}  // namespace vortex
