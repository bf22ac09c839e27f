#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "vortex/capacity.hpp"
#include "vortex/poisson.hpp"
#include "vortex/radial_profile.hpp"
#include "vortex/routh.hpp"
#include "vortex/semilinear.hpp"

using namespace vortex;

static void BM_GridBuild(benchmark::State& st) {
  const double h = 1.0 / st.range(0);
  Domain d = Domain::disc(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(Grid::build(d, h));
}
BENCHMARK(BM_GridBuild)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_PoissonFactor(benchmark::State& st) {
  auto g = Grid::build(Domain::disc(1.0), 1.0 / st.range(0));
  for (auto _ : st) PoissonSolver s(g);
}
BENCHMARK(BM_PoissonFactor)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_PoissonSolve(benchmark::State& st) {
  auto g = Grid::build(Domain::disc(1.0), 1.0 / st.range(0));
  PoissonSolver s(g, st.range(1) ? SolverMethod::Pcg : SolverMethod::Direct);
  std::vector<double> rhs(g->interior_count(), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(s.solve(rhs));
  st.SetLabel(st.range(1) ? "pcg" : "direct");
}
BENCHMARK(BM_PoissonSolve)->Args({256, 0})->Args({256, 1})->Unit(benchmark::kMillisecond);

static void BM_UnitProfile(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(solve_unit_profile(3.0));
}
BENCHMARK(BM_UnitProfile)->Unit(benchmark::kMillisecond);

static void BM_RouthMaximize(benchmark::State& st) {
  RouthConfig c;
  c.mode = RouthMode::Rotating;
  c.kappa = kPi;
  c.alpha = 1.0;
  c.green = GreenEvaluator::analytic(Domain::disc(1.0));
  for (auto _ : st) benchmark::DoNotOptimize(routh_maximize(c));
}
BENCHMARK(BM_RouthMaximize)->Unit(benchmark::kMillisecond);

static void BM_Dynamics(benchmark::State& st) {
  RouthConfig c;
  c.mode = RouthMode::Pair;
  c.kappa = kTwoPi;
  c.kappa_minus = -kTwoPi;
  c.green = GreenEvaluator::whole_plane();
  VortexState s0{{{0, 0.5}, {0, -0.5}}, {kTwoPi, -kTwoPi}, 0};
  for (auto _ : st) benchmark::DoNotOptimize(integrate_dynamics(s0, c, 1e-3, 1.0, 100));
}
BENCHMARK(BM_Dynamics)->Unit(benchmark::kMillisecond);

static void BM_SegmentRay(benchmark::State& st) {
  double s = 0.5;
  for (auto _ : st) {
    benchmark::DoNotOptimize(capacity_segment_ray(s));
    s = s < 100 ? s * 1.1 : 0.5;
  }
}
BENCHMARK(BM_SegmentRay);

// one full single-vortex solve; slow, so few iterations
static void BM_SolveSingle(benchmark::State& st) {
  Domain d = Domain::disc(1.0);
  ProblemSpec s;
  s.solver = std::make_shared<PoissonSolver>(Grid::build(d, 1.0 / 128));
  s.green = GreenEvaluator::analytic(d);
  s.p = 3;
  s.kappa = kTwoPi;
  s.eps = 0.1;
  for (auto _ : st) benchmark::DoNotOptimize(solve_single(s));
}
BENCHMARK(BM_SolveSingle)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK_MAIN();
