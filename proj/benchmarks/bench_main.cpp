#include <benchmark/benchmark.h>

#include <cmath>

#include "rotshock/elliptic.hpp"
#include "rotshock/iteration.hpp"
#include "rotshock/shockfit.hpp"
#include "rotshock/supersonic.hpp"

using namespace rotshock;

namespace {

Problem rotating(double sigma) {
  GasModel gas{1.4, 0.1};
  UpstreamSpec up;
  up.u_minus = Profile::poly({2.0, 0.0, 0.1});
  Geometry geo;
  geo.sigma = sigma;
  Perturbation p;
  p.u2_en = Profile::poly({0.0, 1.0, -1.0});
  p.S_en = Profile::poly({0.0, 0.2});
  p.P_ex = Profile::poly({-1.148485298});
  return Problem::build(gas, up, geo, p, 513);
}

RunOptions options(int nx) {
  RunOptions o;
  o.shock.sup.nx = nx;
  o.shock.sup.ny = (nx + 1) / 2;
  o.shock.bracket = std::make_pair(0.2, 0.7);
  return o;
}

}  // namespace

static void BM_Background(benchmark::State& st) {
  UpstreamSpec up;
  up.u_minus = Profile::poly({2.0, 0.0, 0.1});
  GasModel gas{1.4, 0.1};
  for (auto _ : st) benchmark::DoNotOptimize(build_background(up, gas, st.range(0)));
}
BENCHMARK(BM_Background)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

static void BM_EllipticSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const double pi = std::acos(-1.0);
  EllipticProblem p;
  p.lam1 = [](double y) { return 1.0 + 0.3 * y; };
  p.lam2 = [](double y) { return 2.0 - 0.5 * y; };
  p.lam3 = [](double y) { return 1.5 + 0.2 * y * y; };
  p.lam4 = [](double y) { return 0.8 + 0.1 * y; };
  p.H1 = [&](double x, double y) { return std::sin(pi * x) * std::cos(pi * y); };
  p.H2 = [&](double x, double y) { return std::cos(pi * x) * y; };
  p.h1 = [](double) { return 0.0; };
  p.h2 = [](double) { return 0.0; };
  p.h3 = [](double) { return 0.0; };
  auto d = p.discretize(n, n);
  EllipticOptions o;
  o.project = true;
  for (auto _ : st) benchmark::DoNotOptimize(solve(d, o));
}
BENCHMARK(BM_EllipticSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SupersonicNonlinear(benchmark::State& st) {
  const Problem pr = rotating(1e-3);
  SupersonicOptions o;
  o.nx = static_cast<int>(st.range(0));
  o.ny = (o.nx + 1) / 2;
  for (auto _ : st) benchmark::DoNotOptimize(solve_nonlinear(pr, o));
}
BENCHMARK(BM_SupersonicNonlinear)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

static void BM_ApplyT(benchmark::State& st) {
  const Problem pr = rotating(1e-3);
  const auto o = options(static_cast<int>(st.range(0)));
  const auto ia = initial_approximation(pr, o.shock);
  auto sup = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, o.shock.sup));
  const NonlinearScheme scheme(pr, ia, sup, o.iter);
  const IterationState s = scheme.initial_state();
  for (auto _ : st) benchmark::DoNotOptimize(scheme.apply_T(s));
}
BENCHMARK(BM_ApplyT)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

static void BM_FullRun(benchmark::State& st) {
  const Problem pr = rotating(1e-3);
  const auto o = options(129);
  for (auto _ : st) benchmark::DoNotOptimize(run(pr, o));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
