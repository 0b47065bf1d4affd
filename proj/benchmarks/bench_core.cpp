#include <benchmark/benchmark.h>

#include "diffbeam/bessel.hpp"
#include "diffbeam/designer.hpp"
#include "diffbeam/metrics.hpp"
#include "diffbeam/solvers.hpp"

using namespace diffbeam;

namespace {

ArrayGeometry bench_array(int m) { return ArrayGeometry::alternating(m, 0.01, 0.0); }

DesignSpec bench_spec() {
  DesignSpec spec;
  spec.order = 2;
  spec.steer_theta_s = kPi / 2;
  spec.null_offsets = {kPi / 2, 5 * kPi / 6};
  return spec;
}

}  // namespace

static void BM_BesselSequence(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j_sequence(2, x));
    x = x < 60.0 ? x + 0.37 : 0.1;
  }
}
BENCHMARK(BM_BesselSequence);

static void BM_GammaMatrix(benchmark::State& state) {
  const auto geom = bench_array(static_cast<int>(state.range(0)));
  const double k = wavenumber(2000.0);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_matrix(geom, k));
}
BENCHMARK(BM_GammaMatrix)->Arg(5)->Arg(11)->Arg(32);

static void BM_SolveInc(benchmark::State& state) {
  const auto geom = bench_array(static_cast<int>(state.range(0)));
  const auto spec = bench_spec();
  const auto pattern = solve_coefficients(spec.steer_theta_s, spec.null_offsets, spec.order);
  const double k = wavenumber(1000.0);
  const auto cs = build_constraints(geom, k, spec.steer_theta_s, spec.null_offsets);
  const auto gamma = gamma_matrix(geom, k);
  const ComplexVector q = pattern_coupling_vector(geom, k, pattern);
  for (auto _ : state) benchmark::DoNotOptimize(solve_inc(cs, gamma, q, 10.0));
}
BENCHMARK(BM_SolveInc)->Arg(7)->Arg(11)->Arg(32);

static void BM_DesignBroadband(benchmark::State& state) {
  const auto geom = bench_array(11);
  const auto spec = bench_spec();
  const DesignOptions options{static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(design_broadband(spec, geom, options));
}
BENCHMARK(BM_DesignBroadband)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
