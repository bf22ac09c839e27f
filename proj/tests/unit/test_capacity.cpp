#include "doctest.h"

#include <gsl/gsl_integration.h>

#include <cmath>

#include "vortex/capacity.hpp"
#include "vortex/error.hpp"

using namespace vortex;

namespace {

double agm_K(double k, double tol) {
  double a = 1, b = std::sqrt(1 - k * k);
  while (std::abs(a - b) > tol * a) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2 * a);
}

double quad_K(double k) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  gsl_function F;
  F.function = [](double t, void* p) {
    double kk = *static_cast<double*>(p);
    return 1 / std::sqrt(1 - kk * kk * std::sin(t) * std::sin(t));
  };
  F.params = &k;
  double r = 0, err = 0;
  gsl_integration_qags(&F, 0, kPi / 2, 0, 1e-13, 1000, ws, &r, &err);
  gsl_integration_workspace_free(ws);
  return r;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("complete elliptic integral") {
  CHECK(elliptic_K(0.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
  const double g = std::sqrt(0.5);
  CHECK(std::abs(elliptic_K(g) - quad_K(g)) < 1e-10);
  CHECK(elliptic_K(g) == doctest::Approx(1.8540747).epsilon(1e-7));
  for (double k : {0.1, 0.5, 0.9, 0.999}) CHECK(std::abs(elliptic_K(k) - quad_K(k)) < 1e-9 * quad_K(k));
  CHECK(code_of([] { elliptic_K(1.0); }) == ErrorCode::ModulusOutOfRange);
}

TEST_CASE("segment-ray capacity closed form") {
  auto c1 = capacity_segment_ray(1.0);
  CHECK(c1.capa == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c1.lhs == doctest::Approx(kPi));
  CHECK(c1.bound == doctest::Approx(std::log(32.0)).epsilon(1e-14));
  CHECK(c1.bound_ok);

  auto ref = [](double s, double tol) {
    return 2 * agm_K(std::sqrt(1 / (1 + s)), tol) / agm_K(std::sqrt(s / (1 + s)), tol);
  };
  double a = ref(3.0, 1e-12), b = ref(3.0, 1e-16);
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(capacity_segment_ray(3.0).capa == doctest::Approx(b).epsilon(1e-12));

  for (double s : {0.01, 0.5, 2.0, 10.0, 1e3}) CHECK(capacity_segment_ray(s).bound_ok);
  CHECK(code_of([] { capacity_segment_ray(0.0); }) == ErrorCode::NonPositiveS);
}

TEST_CASE("annulus condenser") {
  CapacitySpec spec;
  spec.omega = Domain::disc(std::exp(1.0));
  spec.K = CompactSet::disc({0, 0}, 1.0);
  spec.h = 0.01;
  auto r = capacity_numeric(spec);
  CHECK(r.capa == doctest::Approx(kTwoPi).epsilon(0.03));
  CHECK(r.capa_form == doctest::Approx(kTwoPi).epsilon(0.03));
}

TEST_CASE("plate touching the outer boundary") {
  CapacitySpec spec;
  spec.omega = Domain::disc(1.0);
  spec.K = CompactSet::disc({0.5, 0}, 0.6);
  spec.h = 0.02;
  auto c = code_of([&] { capacity_numeric(spec); });
  CHECK((c == ErrorCode::GapUnderResolved || c == ErrorCode::InvalidGeometry));
}

TEST_CASE("numeric segment-ray condenser") {
  auto r = segment_ray_numeric(1.0, 0.01);
  CHECK(r.exact == doctest::Approx(2.0));
  CHECK(r.rel_error < 0.05);
}

TEST_CASE("capacity inequality suite") {
  auto rep = check_capacity_bounds(0.02);
  CHECK(rep.violations == 0);
  bool measure = false, ball = false;
  for (const auto& c : rep.checks) {
    CHECK_MESSAGE(c.holds, c.name);
    if (c.bound == "measure") measure = true;
    if (c.bound == "obstacle-ball") ball = true;
  }
  CHECK(measure);
  CHECK(ball);
}

TEST_CASE("capacity is monotone in the plate and in the domain") {
  auto capa = [](Domain om, CompactSet K) {
    CapacitySpec s;
    s.omega = om;
    s.K = K;
    s.h = 0.02;
    return capacity_numeric(s).capa_form;
  };
  Domain d1 = Domain::disc(1.0);
  double a = capa(d1, CompactSet::disc({0.1, 0}, 0.2));
  double b = capa(d1, CompactSet::disc({0.1, 0}, 0.3));
  double c = capa(d1, CompactSet::rectangle({-0.25, -0.35}, {0.45, 0.35}));
  CHECK(a < b);
  CHECK(b < c);
  // larger Ω, same plate
  CHECK(capa(Domain::disc(1.5), CompactSet::disc({0.1, 0}, 0.3)) < b);
  CHECK(capa(Domain::rectangle(-0.9, 0.9, -0.9, 0.9), CompactSet::disc({0.1, 0}, 0.3)) > b);
}

TEST_CASE("segment-ray capacity decreases in s; K increases in its modulus") {
  double prev = capacity_segment_ray(0.1).capa;
  for (int i = 1; i < 10; ++i) {
    double c = capacity_segment_ray(0.1 * std::pow(2.0, i)).capa;
    CHECK(c < prev);
    prev = c;
  }
  double k = elliptic_K(0.0);
  for (double g = 0.05; g < 0.999; g += 0.05) {
    CHECK(elliptic_K(g) > k);
    k = elliptic_K(g);
  }
}
