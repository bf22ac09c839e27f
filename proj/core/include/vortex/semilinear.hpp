#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vortex/green.hpp"
#include "vortex/grid_field.hpp"
#include "vortex/poisson.hpp"
#include "vortex/routh.hpp"

namespace vortex {

// Dirichlet data on artificial window edges.
enum class FarField { Zero, GreenMatched };

// −Δu = ε⁻² f(u − q^ε)  (single)   or
// −Δu = ε₊⁻² f(u − q₊^ε) − ε₋⁻² f(q₋^ε − u)  (pair),   f(t) = t₊^p.
// Floating components of the solver become the constant-on-holes, zero-flux conditions.
struct ProblemSpec {
  std::shared_ptr<const PoissonSolver> solver;
  std::shared_ptr<const GreenEvaluator> green;
  double p = 3.0;
  double kappa = 2 * kPi;
  double eps = 0.05;
  bool pair = false;
  double kappa_minus = -2 * kPi;
  double eps_minus = 0.05;
  BackgroundField background;  // q
  FarField far_field = FarField::GreenMatched;
  std::optional<Vec2> far_field_center;  // default: the initial vortex centre

  const Grid& grid() const { return solver->grid(); }
  double q_eps(Vec2 x) const;        // q + (κ/2π) log(1/ε)
  double q_eps_minus(Vec2 x) const;  // q + (κ₋/2π) log(1/ε₋)
  void validate() const;
};

struct SolveOptions {
  // move the initial hat to the centre minimising its energy before iterating
  bool refine_center = true;
  double theta = 0.5;
  double theta_fallback = 0.25;
  int max_iter = 500;
  double residual_tol = 1e-6;  // ‖Δu + ω‖ / ‖ω‖
  double energy_tol = 1e-10;   // relative energy change
  bool newton = true;
  double newton_switch = 1e-2;  // Picard residual at which Newton takes over
  int picard_before_newton = 40;
  double newton_tol = 1e-12;
  int newton_max = 40;
  // called after every Picard step (iteration, energy, residual) and Newton step (-step, 0, residual)
  std::function<void(int, double, double)> progress;
};

struct SolveResult {
  GridField u;
  double energy = 0;
  double nehari_residual = 0;        // ⟨dE(u),u⟩/a(u,u), or ⟨dE(u),u₊⟩/a(u₊,u₊)
  double nehari_residual_minus = 0;  // pair: ⟨dE(u),u₋⟩/a(u₋,u₋)
  double pde_residual = 0;
  int iterations = 0;
  int newton_steps = 0;
  bool converged = false;
  double theta = 0.5;
  std::vector<Vec2> centers;  // centres of the initial hat function(s)
  double init_energy = 0;     // energy of the initial guess (the hat function by default)
  Vec2 far_field_center;
};

struct NehariScale {
  double t = 0;
  GridField field;
  double residual = 0;  // ⟨dE(tw), tw⟩ / a(tw, tw)
};

// t* > 0 with ⟨dE(t w), w⟩ = 0
NehariScale nehari_scale(const GridField& w, const ProblemSpec& spec);

struct HatFunction {
  GridField u;
  double kappa_hat = 0;
  double sigma = 0;
  double rho = 0;
  bool sigma_root = false;  // false: σ-equation unsolved, field rescaled onto 𝒩 instead
};

// Û(x) = U_κ̂((x − x̂)/ε) + κ̂((1/2π) log(1/(ερ_κ̂)) + H(x̂, x)) with σ tuned so Û lies on 𝒩.
HatFunction hat_function(const ProblemSpec& spec, Vec2 xhat);
// pair version; placed on the nodal Nehari set by the two-parameter scaling
GridField pair_hat_function(const ProblemSpec& spec, Vec2 xplus, Vec2 xminus);

double energy(const GridField& u, const ProblemSpec& spec);

SolveResult solve_single(const ProblemSpec& spec, const std::optional<GridField>& init = {},
                         const SolveOptions& opt = {});
SolveResult solve_single_at(const ProblemSpec& spec, Vec2 center, const SolveOptions& opt = {});
SolveResult solve_pair(const ProblemSpec& spec, const std::optional<GridField>& init = {},
                       const SolveOptions& opt = {});
SolveResult solve_pair_at(const ProblemSpec& spec, Vec2 xplus, Vec2 xminus, const SolveOptions& opt = {});

struct VortexDiagnostics {
  int sign = 1;
  std::size_t nodes = 0;  // |A^ε| in interior nodes
  GridField omega;
  double kappa_eps = 0;
  double r_bar = 0;     // largest disc around x^ε inside A^ε
  double r_ring = 0;    // smallest disc around x^ε containing A^ε
  double diameter = 0;  // diam A^ε (level-set crossings)
  int components = 0;
  double energy = 0;

  bool empty() const { return nodes == 0 || kappa_eps == 0; }
  Vec2 centroid() const;  // x^ε; throws EmptyVorticity

  Vec2 x_eps;  // meaningful only when !empty()
};

// sign = +1: A = {u > q₊^ε}; sign = −1 (pair): A = {u < q₋^ε}
VortexDiagnostics diagnostics(const GridField& u, const ProblemSpec& spec, int sign = 1);

struct SweepPoint {
  double eps = 0;
  double kappa_eps = 0;
  Vec2 x_eps;
  double energy = 0;
  double energy_shifted = 0;  // E − (κ²/4π) log(1/ε)
  double hat_energy = 0;
  double diam_ratio = 0;      // diam(A)/(2ε)
  double r_bar = 0, r_ring = 0;
  int components = 0;
  int iterations = 0;
  bool converged = false;
  double pde_residual = 0;
  double nehari_residual = 0;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  double kappa = 0;
  double rho_kappa = 0;
  double limit_constant = 0;  // 𝒞
  Vec2 x_star;                // Routh maximiser
  double W_star = 0;
  // κ^ε ≈ c₁ + c₂/log(1/ε)
  double c1 = 0, c2 = 0, fit_residual = 0;
  double c2_predicted = 0;  // 2π(q(x*) − κH(x*,x*) − (κ/2π) log(1/ρ_κ))
  double energy_limit = 0;  // Aitken extrapolation of E − (κ²/4π) log(1/ε)
  double energy_limit_predicted = 0;  // −W(x*) + 𝒞
};

SweepReport epsilon_sweep(const ProblemSpec& tmpl, std::span<const double> eps_list, const SolveOptions& opt = {});

// Aitken Δ² on the last three entries
double aitken(std::span<const double> s);

}  // namespace vortex
