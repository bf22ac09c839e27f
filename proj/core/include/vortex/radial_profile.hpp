#pragma once

#include <vector>

namespace vortex {

// Positive radial solution of v'' + v'/r + v^p = 0 on [0,1], v'(0) = 0, v(1) = 0.
struct RadialProfile {
  double p = 0;
  double dr = 0;
  std::vector<double> v;   // v(k*dr), k = 0..n
  std::vector<double> dv;  // v'(k*dr)
  double v0 = 0;           // v(0)
  double slope1 = 0;       // v'(1) (negative)
  double gamma = 0;        // 2π ∫ v^p r dr
  double int_vp1 = 0;      // ∫_{B1} v^{p+1}
  double int_grad2 = 0;    // ∫_{B1} |∇v|^2

  double value(double r) const;  // Hermite interpolation, 0 for r >= 1
  double slope(double r) const;
  // largest |v'' + v'/r + v^p| over the samples, by central differences
  double ode_residual() const;
};

RadialProfile solve_unit_profile(double p, double dr = 1e-4);

// U_κ(y) = ρ^{-2/(p-1)} V(|y|/ρ) in the core, (κ/2π) log(ρ/|y|) outside.
struct ProfileForKappa {
  const RadialProfile* unit = nullptr;
  double kappa = 0;
  double rho = 0;    // core radius ρ_κ = (γ/κ)^{(p-1)/2}
  double scale = 0;  // ρ^{-2/(p-1)}

  double U(double r) const;
  double dU(double r) const;  // radial derivative
};

ProfileForKappa profile_for_kappa(const RadialProfile& prof, double kappa);

// 𝒞 = (κ²/4π) log ρ_κ + ∫_{B(0,ρ_κ)} (|∇U|²/2 − U^{p+1}/(p+1))
double limit_constant(const ProfileForKappa& pk);
// just the ball integral term of 𝒞
double core_energy(const ProfileForKappa& pk);

}  // namespace vortex
