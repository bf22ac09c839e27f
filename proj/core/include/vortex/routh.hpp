#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vortex/green.hpp"

namespace vortex {

// Smooth lift of q away from a chosen point: q + s(|x − c|)·lift, s a C² step from
// 0 (|x−c| ≤ r_in) to 1 (|x−c| ≥ r_out).
struct Cutoff {
  Vec2 center;
  double r_in = 0;
  double r_out = 0;
  double lift = 0;
};

// Background stream data q entering the shifted problem: q = −ψ₀ − α|x|²/2 (+ optional terms).
class BackgroundField {
 public:
  BackgroundField() = default;
  static BackgroundField rotation(double alpha);
  // q = w∞ (x₁ − a₀): uniform flow past the wall x₁ = a₀
  static BackgroundField uniform_flow(double w_inf, double a0 = 0.0);
  static BackgroundField custom(std::function<double(Vec2)> q, std::function<Vec2(Vec2)> grad = {});
  static BackgroundField from_psi0(GridField psi0, double alpha);

  BackgroundField with_cutoff(const Cutoff& c) const;

  double operator()(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  double alpha() const { return alpha_; }
  const GridField* psi0() const { return psi0_.get(); }
  bool is_zero() const;
  // q depends on |x| only (rotation term alone)
  bool radial() const;
  // depends on x₁ only
  bool x2_invariant() const { return !psi0_ && alpha_ == 0 && !custom_ && !cutoff_; }

 private:
  std::shared_ptr<const GridField> psi0_;
  double alpha_ = 0;
  double w_inf_ = 0;
  double a0_ = 0;
  std::function<double(Vec2)> custom_;
  std::function<Vec2(Vec2)> custom_grad_;
  std::optional<Cutoff> cutoff_;
};

// outward normal velocity at a boundary point of the given component
using NormalFlux = std::function<double(Vec2 point, int component)>;

// ψ₀ with −∂ψ₀/∂τ = v_n on every component (τ counterclockwise about the component),
// ψ₀ = 0 at the reference point θ = 0 of the outer boundary, ∮_{∂Ω_h} ∂ψ₀/∂n = γ_h around hole h.
BackgroundField build_stream_q(std::shared_ptr<const Grid> g, const NormalFlux& v_n, const std::vector<double>& gamma,
                               double alpha);

enum class RouthMode { Single, Pair, Star, Rotating, FreeStream };

struct RouthConfig {
  RouthMode mode = RouthMode::Single;
  double kappa = 1.0;         // κ, or κ₊ in pair mode
  double kappa_minus = -1.0;  // κ₋ (pair mode)
  double alpha = 0.0;         // rotating mode
  double w_inf = 0.0;         // free-stream mode
  std::shared_ptr<const GreenEvaluator> green;
  BackgroundField background;

  void validate() const;
  int vortex_count() const { return mode == RouthMode::Pair ? 2 : 1; }
  // background plus the mode's own term (−α|x|²/2, or w∞(x₁ − a₀))
  double q(Vec2 x) const;
  Vec2 grad_q(Vec2 x) const;
};

double routh_eval(const RouthConfig& cfg, std::span<const Vec2> xs);
inline double routh_eval(const RouthConfig& cfg, Vec2 x) { return routh_eval(cfg, std::span<const Vec2>(&x, 1)); }

// W for N vortices: Σ_{i<j} κ_iκ_j G + Σ κ_i²/2 H(x_i,x_i) − Σ κ_i q(x_i)
double kirchhoff_routh(const RouthConfig& cfg, std::span<const Vec2> xs, std::span<const double> kappa);
std::vector<Vec2> kirchhoff_routh_gradient(const RouthConfig& cfg, std::span<const Vec2> xs,
                                           std::span<const double> kappa);

struct ScanOptions {
  int cells = 0;   // per axis; 0 = 64 for analytic kernels, 16 otherwise
  int starts = 4;  // Nelder–Mead restarts from the best coarse cells
};

struct RouthMaximum {
  std::vector<Vec2> points;
  double value = 0;
  bool near_boundary = false;
  int evaluations = 0;
};

RouthMaximum routh_maximize(const RouthConfig& cfg, const ScanOptions& opt = {});

struct ScanGrid {
  int nx = 0, ny = 0;
  std::vector<Vec2> x;
  std::vector<double> W;  // -inf outside the admissible set
};
ScanGrid routh_scan(const RouthConfig& cfg, int nx, int ny);

struct VortexState {
  std::vector<Vec2> x;
  std::vector<double> kappa;
  double t = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<Vec2>> x;
  std::vector<double> W;
};

// Kirchhoff's law κ_i ẋ_i = (∇_{x_i} W)^⊥ with x^⊥ = (x₂, −x₁), classical RK4.
Trajectory integrate_dynamics(const VortexState& s0, const RouthConfig& cfg, double dt, double T,
                              int record_every = 1);

std::vector<Vec2> vortex_velocities(const RouthConfig& cfg, std::span<const Vec2> xs, std::span<const double> kappa);

}  // namespace vortex
