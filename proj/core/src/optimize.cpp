#include "vortex/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>

namespace vortex {

namespace {

struct Objective {
  const std::function<double(const std::vector<double>&)>* f;
  std::vector<double> buf;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* o = static_cast<Objective*>(params);
  for (std::size_t i = 0; i < o->buf.size(); ++i) o->buf[i] = gsl_vector_get(v, i);
  double val = (*o->f)(o->buf);
  // GSL minimises; walls become a huge finite value so the simplex can still contract
  return std::isfinite(val) ? -val : 1e300;
}

}  // namespace

SimplexResult nelder_mead_maximize(const std::function<double(const std::vector<double>&)>& f,
                                   const std::vector<double>& x0, const std::vector<double>& step,
                                   double size_tol, double value_tol, int max_iter) {
  const std::size_t n = x0.size();
  Objective obj{&f, std::vector<double>(n)};
  gsl_multimin_function fn{&trampoline, n, &obj};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), &gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

  SimplexResult res;
  double prev = s->fval;
  int stall = 0;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    double size = gsl_multimin_fminimizer_size(s.get());
    stall = std::abs(prev - s->fval) < value_tol ? stall + 1 : 0;
    prev = s->fval;
    if (size < size_tol || (stall > 20 * static_cast<int>(n) && size < 1e3 * size_tol)) {
      res.converged = true;
      break;
    }
  }
  gsl_set_error_handler(old);
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(s->x, i);
  res.value = s->fval >= 1e300 ? -std::numeric_limits<double>::infinity() : -s->fval;
  return res;
}

}  // namespace vortex
