#include "vortex/radial_profile.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "vortex/error.hpp"
#include "vortex/vec2.hpp"

namespace vortex {

namespace {

using State = std::array<double, 2>;

struct LaneEmden {
  double p;
  void operator()(const State& s, State& ds, double r) const {
    ds[0] = s[1];
    ds[1] = -s[1] / r - std::pow(std::max(s[0], 0.0), p);
  }
};

// integrates from the series start at r = dr; samples[k] = state at k*dr
template <class Observer>
State shoot(double p, double a, double dr, Observer&& obs) {
  namespace ode = boost::numeric::odeint;
  const int n = static_cast<int>(std::lround(1.0 / dr));
  State s{a - std::pow(a, p) * dr * dr / 4.0, -std::pow(a, p) * dr / 2.0};
  obs(s, dr);
  ode::runge_kutta4<State> rk;
  LaneEmden sys{p};
  for (int k = 1; k < n; ++k) {
    rk.do_step(sys, s, k * dr, dr);
    obs(s, (k + 1) * dr);
  }
  return s;
}

double simpson(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size() - 1;  // even number of intervals expected
  double s = f.front() + f.back();
  for (std::size_t k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f[k];
  return s * dx / 3.0;
}

}  // namespace

RadialProfile solve_unit_profile(double p, double dr) {
  if (!(p > 1.0)) fail(ErrorCode::UnsupportedExponent, "exponent must exceed 1");
  const int n = static_cast<int>(std::lround(1.0 / dr));
  if (n < 100 || n % 2) fail(ErrorCode::InvalidSpec, "radial step must divide 1 into an even number >= 100 of steps");
  dr = 1.0 / n;

  auto end_value = [&](double a) { return shoot(p, a, dr, [](const State&, double) {})[0]; };

  double lo = 0.1, hi = 10.0;
  int grow = 0;
  while (end_value(lo) <= 0 && grow++ < 60) lo /= 2;
  while (end_value(hi) >= 0 && grow++ < 120) hi *= 2;
  if (end_value(lo) <= 0 || end_value(hi) >= 0) fail(ErrorCode::NoConvergence, "shooting bracket failed");
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (end_value(mid) > 0 ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);

  RadialProfile prof;
  prof.p = p;
  prof.dr = dr;
  prof.v0 = a;
  prof.v.assign(n + 1, 0.0);
  prof.dv.assign(n + 1, 0.0);
  prof.v[0] = a;
  shoot(p, a, dr, [&](const State& s, double r) {
    int k = static_cast<int>(std::lround(r / dr));
    prof.v[k] = s[0];
    prof.dv[k] = s[1];
  });
  prof.slope1 = prof.dv[n];

  std::vector<double> fp(n + 1), fp1(n + 1), fg(n + 1);
  for (int k = 0; k <= n; ++k) {
    double r = k * dr, v = std::max(prof.v[k], 0.0);
    fp[k] = std::pow(v, p) * r;
    fp1[k] = std::pow(v, p + 1) * r;
    fg[k] = prof.dv[k] * prof.dv[k] * r;
  }
  prof.gamma = kTwoPi * simpson(fp, dr);
  prof.int_vp1 = kTwoPi * simpson(fp1, dr);
  prof.int_grad2 = kTwoPi * simpson(fg, dr);
  return prof;
}

double RadialProfile::value(double r) const {
  if (r >= 1.0) return 0.0;
  r = std::max(r, 0.0);
  const std::size_t n = v.size() - 1;
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(r / dr), n - 1);
  double t = (r - k * dr) / dr;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * v[k] + h10 * dr * dv[k] + h01 * v[k + 1] + h11 * dr * dv[k + 1];
}

double RadialProfile::slope(double r) const {
  if (r >= 1.0) return slope1;
  r = std::max(r, 0.0);
  const std::size_t n = v.size() - 1;
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(r / dr), n - 1);
  double t = (r - k * dr) / dr;
  double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1, d01 = -d00, d11 = 3 * t * t - 2 * t;
  return (d00 * v[k] + d01 * v[k + 1]) / dr + d10 * dv[k] + d11 * dv[k + 1];
}

double RadialProfile::ode_residual() const {
  double worst = 0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    double r = k * dr;
    double vpp = (v[k + 1] - 2 * v[k] + v[k - 1]) / (dr * dr);
    double res = vpp + dv[k] / r + std::pow(std::max(v[k], 0.0), p);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

ProfileForKappa profile_for_kappa(const RadialProfile& prof, double kappa) {
  if (!(kappa > 0)) fail(ErrorCode::NonPositiveKappa, "circulation must be positive");
  ProfileForKappa pk;
  pk.unit = &prof;
  pk.kappa = kappa;
  pk.rho = std::pow(prof.gamma / kappa, (prof.p - 1) / 2);
  pk.scale = std::pow(pk.rho, -2.0 / (prof.p - 1));
  return pk;
}

double ProfileForKappa::U(double r) const {
  if (r < rho) return scale * unit->value(r / rho);
  return kappa / kTwoPi * std::log(rho / r);
}

double ProfileForKappa::dU(double r) const {
  if (r < rho) return scale * unit->slope(r / rho) / rho;
  return -kappa / (kTwoPi * r);
}

double core_energy(const ProfileForKappa& pk) {
  const double p = pk.unit->p;
  // |∇U|² integrates to λ² ∫|∇V|², U^{p+1} to λ^{p+1} ρ² ∫V^{p+1}
  return 0.5 * pk.scale * pk.scale * pk.unit->int_grad2 -
         std::pow(pk.scale, p + 1) * pk.rho * pk.rho * pk.unit->int_vp1 / (p + 1);
}

double limit_constant(const ProfileForKappa& pk) {
  return pk.kappa * pk.kappa / (4 * kPi) * std::log(pk.rho) + core_energy(pk);
}

}  // namespace vortex
