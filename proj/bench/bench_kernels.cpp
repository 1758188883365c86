#include <benchmark/benchmark.h>
#include <omp.h>

#include <memory>

#include "rsavg/kernels.hpp"
#include "rsavg/newform.hpp"

using namespace rsavg;

namespace {

// family (p^2, p) for D = -7, N = 11, p = 3 at tolerance 1e-8
struct Fixture {
  ImagQuadField K{-7};
  PassSpec S = family_pass_spec(K, 11, 3, 2, 1, -1, 3, 1e-8);
  NewformTable f = build_table(seeds_from_curve(WeierstrassCurve::parse("0,-1,1,-10,-20"), S.levels.max_cut()),
                               S.levels.max_cut());
  std::shared_ptr<const OrderClassGroup> G = std::make_shared<const OrderClassGroup>(K, 9);
  PrimeIdealClasses P{G, S.levels.max_cut(), primes_upto(S.levels.max_cut())};
};

const Fixture& fixture() {
  static const Fixture F;
  return F;
}

void BM_ClassResidueSumsSerial(benchmark::State& state) {
  const auto& F = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(class_residue_sums_serial(F.S, F.f, *F.G).raw().data());
}

void BM_ClassResidueSumsParallel(benchmark::State& state) {
  const auto& F = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(class_residue_sums(F.S, F.f, F.P).raw().data());
}

void BM_LatticeSumsSerial(benchmark::State& state) {
  const auto& F = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(lattice_sums_serial(F.S, F.f).raw().data());
}

void BM_LatticeSumsParallel(benchmark::State& state) {
  const auto& F = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lattice_sums(F.S, F.f).raw().data());
}

}  // namespace

BENCHMARK(BM_ClassResidueSumsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassResidueSumsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LatticeSumsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LatticeSumsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
