#include "doctest.h"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "vortex/error.hpp"
#include "vortex/radial_profile.hpp"
#include "vortex/vec2.hpp"

using namespace vortex;

namespace {

// Independent oracle: Lane–Emden w'' + w'/s + w^p = 0, w(0) = 1, integrated with a dense
// Dormand–Prince stepper up to its first zero s0; then V(r) = s0^{2/(p-1)} w(s0 r).
struct Shoot {
  double s0 = 0, dw0 = 0;
  double v0 = 0, slope1 = 0, gamma = 0;
};

Shoot lane_emden(double p) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  auto rhs = [p](const State& y, State& dy, double s) {
    dy[0] = y[1];
    dy[1] = -y[1] / s - std::pow(std::max(y[0], 0.0), p);
  };
  const double s_start = 1e-6;
  State y{1.0 - s_start * s_start / 4, -s_start / 2};
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  stepper.initialize(y, s_start, 1e-4);
  while (stepper.current_state()[0] > 0) stepper.do_step(rhs);
  double lo = stepper.previous_time(), hi = stepper.current_time();
  State m;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    stepper.calc_state(mid, m);
    (m[0] > 0 ? lo : hi) = mid;
  }
  stepper.calc_state(0.5 * (lo + hi), m);
  Shoot out;
  out.s0 = 0.5 * (lo + hi);
  out.dw0 = m[1];
  double a = 2.0 / (p - 1);
  out.v0 = std::pow(out.s0, a);
  out.slope1 = std::pow(out.s0, a + 1) * out.dw0;
  out.gamma = kTwoPi * std::abs(out.slope1);
  return out;
}

}  // namespace

TEST_CASE("p = 1 is rejected") {
  CHECK_THROWS_AS(solve_unit_profile(1.0), Error);
  try {
    solve_unit_profile(1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedExponent);
  }
}

TEST_CASE("p = 3 profile against the Lane-Emden shooting oracle") {
  auto prof = solve_unit_profile(3.0);
  Shoot ref = lane_emden(3.0);
  CHECK(prof.v0 == doctest::Approx(ref.v0).epsilon(1e-7));
  CHECK(prof.slope1 == doctest::Approx(ref.slope1).epsilon(1e-7));
  CHECK(prof.gamma == doctest::Approx(ref.gamma).epsilon(1e-7));
  // divergence identity 2π|V'(1)| = γ
  CHECK(std::abs(kTwoPi * std::abs(prof.slope1) - prof.gamma) < 1e-8);
  CHECK(prof.ode_residual() < 1e-4);
  CHECK(prof.value(1.0) == doctest::Approx(0.0));
  CHECK(prof.value(0.0) == doctest::Approx(prof.v0));
}

TEST_CASE("p = 2: two resolutions agree and match the oracle") {
  auto a = solve_unit_profile(2.0, 1e-4);
  auto b = solve_unit_profile(2.0, 5e-5);
  CHECK(std::abs(a.gamma - b.gamma) / b.gamma < 1e-6);
  Shoot ref = lane_emden(2.0);
  CHECK(b.gamma == doctest::Approx(ref.gamma).epsilon(1e-6));
}

TEST_CASE("core radius scaling for p = 3") {
  auto prof = solve_unit_profile(3.0);
  CHECK(profile_for_kappa(prof, prof.gamma).rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(profile_for_kappa(prof, 4 * prof.gamma).rho == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(profile_for_kappa(prof, -1.0), Error);
}

TEST_CASE("U_kappa vanishes at the core radius and is C1 there") {
  for (double p : {2.0, 3.0, 5.0}) {
    auto prof = solve_unit_profile(p);
    for (double kappa : {1.0, kPi, 2 * kPi, 20.0}) {
      auto pk = profile_for_kappa(prof, kappa);
      CHECK(std::abs(pk.U(pk.rho)) < 1e-12);
      double outside = -kappa / (kTwoPi * pk.rho);
      CHECK(std::abs(pk.dU(pk.rho * (1 - 1e-9)) - outside) < 1e-6 * kappa);
      CHECK(std::abs(pk.dU(pk.rho * (1 + 1e-9)) - outside) < 1e-6 * kappa);
    }
  }
}

TEST_CASE("mass of U_kappa is kappa") {
  auto prof = solve_unit_profile(3.0);
  for (double kappa : {kPi, 2 * kPi}) {
    auto pk = profile_for_kappa(prof, kappa);
    // composite Simpson on [0, rho]
    const int n = 20000;
    const double dr = pk.rho / n;
    double s = 0;
    for (int k = 0; k <= n; ++k) {
      double r = k * dr;
      double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      s += w * std::pow(std::max(pk.U(r), 0.0), 3) * r;
    }
    double mass = kTwoPi * s * dr / 3;
    CHECK(std::abs(mass - kappa) < 1e-6 * kappa);
  }
}

TEST_CASE("limit constant: ball term and scaling consistency") {
  auto prof = solve_unit_profile(3.0);
  auto pk1 = profile_for_kappa(prof, prof.gamma);
  // ρ = 1: ball term is (1/2 − 1/(p+1)) ∫ V^{p+1}
  CHECK(core_energy(pk1) == doctest::Approx(0.25 * prof.int_vp1).epsilon(1e-6));
  CHECK(core_energy(pk1) > 0);
  CHECK(limit_constant(pk1) == doctest::Approx(core_energy(pk1)).epsilon(1e-12));  // log ρ = 0

  auto fine = solve_unit_profile(3.0, 5e-5);
  CHECK(limit_constant(profile_for_kappa(fine, fine.gamma)) == doctest::Approx(limit_constant(pk1)).epsilon(1e-6));

  // κ = 4γ: U(y) = ρ^{-1} V(|y|/ρ) with ρ = 1/4; for p = 3 the ball integral is scale invariant
  auto pk4 = profile_for_kappa(prof, 4 * prof.gamma);
  const int n = 20000;
  const double dr = pk4.rho / n;
  double s = 0;
  for (int k = 0; k <= n; ++k) {
    double r = k * dr;
    double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    s += w * (0.5 * pk4.dU(r) * pk4.dU(r) - std::pow(pk4.U(r), 4) / 4) * r;
  }
  double direct = kTwoPi * s * dr / 3 + 16 * prof.gamma * prof.gamma / (4 * kPi) * std::log(0.25);
  CHECK(limit_constant(pk4) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("U_kappa is strictly decreasing") {
  auto prof = solve_unit_profile(3.0);
  auto pk = profile_for_kappa(prof, kTwoPi);
  double prev = pk.U(0.0);
  for (double r = 0.01; r < 5 * pk.rho; r += 0.01) {
    double u = pk.U(r);
    CHECK(u < prev);
    prev = u;
  }
}

TEST_CASE("scaling covariance in kappa") {
  // κ' = λκ  ⇒  U_κ'(r) = λ U_κ(λ^{(p-1)/2} r)
  for (double p : {2.0, 3.0}) {
    auto prof = solve_unit_profile(p);
    auto a = profile_for_kappa(prof, kTwoPi);
    for (double lam : {0.5, 3.0}) {
      auto b = profile_for_kappa(prof, lam * kTwoPi);
      const double s = std::pow(lam, (p - 1) / 2);
      for (double r : {0.0, 0.3 * b.rho, 0.9 * b.rho, 2 * b.rho})
        CHECK(b.U(r) == doctest::Approx(lam * a.U(s * r)).epsilon(1e-9));
    }
  }
}
