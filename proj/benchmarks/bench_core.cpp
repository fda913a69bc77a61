#include <densitas/exhaust.hpp>
#include <densitas/metric.hpp>
#include <densitas/registry.hpp>
#include <densitas/sampling.hpp>
#include <densitas/set_literal.hpp>
#include <densitas/witness.hpp>

#include <benchmark/benchmark.h>

using namespace densitas;

static void BM_PeriodicCount(benchmark::State& state) {
  auto a = parse_set_literal("per m=360 R={1,7,11,13,17,19,23,29,31,37} t=20 add={2,4}");
  Natural hi = Natural(1) << 60;
  for (auto _ : state) benchmark::DoNotOptimize(a.count_range(12345, hi));
}
BENCHMARK(BM_PeriodicCount);

static void BM_PeriodicUnion(benchmark::State& state) {
  SplitMix64 rng(1);
  auto a = random_periodic(rng, state.range(0)), b = random_periodic(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(set_union(a, b));
}
BENCHMARK(BM_PeriodicUnion)->Arg(60)->Arg(360)->Arg(2520);

static void BM_DStarApUnion(benchmark::State& state) {
  auto a = parse_set_literal("ap a=720 h=1 j0=1 | ap a=5040 h=3 j0=1 | ap a=8! h=5 j0=1");
  auto nu = d_star();
  for (auto _ : state) benchmark::DoNotOptimize(nu(a));
}
BENCHMARK(BM_DStarApUnion);

static void BM_BuckPeriodic(benchmark::State& state) {
  SplitMix64 rng(3);
  auto a = random_periodic(rng, 360);
  auto nu = buck();
  for (auto _ : state) benchmark::DoNotOptimize(nu(a));
}
BENCHMARK(BM_BuckPeriodic);

static void BM_PsiNormDyadic(benchmark::State& state) {
  auto a = power_block_set(static_cast<unsigned>(state.range(0)));
  auto phi = psi_dyadic();
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_norm(phi, a));
}
BENCHMARK(BM_PsiNormDyadic)->Arg(3)->Arg(12);

static void BM_PhiInftyEval(benchmark::State& state) {
  auto a = power_block_set(3);
  for (auto _ : state) benchmark::DoNotOptimize(phi_infty_eval(a, static_cast<std::uint64_t>(state.range(0)), Rational(1, 10'000)));
}
BENCHMARK(BM_PhiInftyEval)->Arg(1 << 12)->Arg(1 << 16);

static void BM_WitnessBuild(benchmark::State& state) {
  auto p = derive_params(Rational(1, 2), 8);
  for (auto _ : state) benchmark::DoNotOptimize(build_witness(p, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_WitnessBuild)->Arg(2)->Arg(6);

static void BM_GapCertificate(benchmark::State& state) {
  auto w = build_witness(derive_params(Rational(1, 2), 8), 4);
  for (auto _ : state) benchmark::DoNotOptimize(banach_gap_certificate(w, 1'000'000));
}
BENCHMARK(BM_GapCertificate)->Unit(benchmark::kMillisecond);

static void BM_CauchyProfileWitness(benchmark::State& state) {
  auto w = build_witness(derive_params(Rational(1, 2), 9), 6);
  auto seq = witness_sequence(w);
  auto nu = bd_star();
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_profile(nu, seq, 5));
}
BENCHMARK(BM_CauchyProfileWitness)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
