// Serial reference against OpenMP kernel for the two exhaustive enumerations.

#include <benchmark/benchmark.h>

#include "bklab/cohomology.hpp"
#include "bklab/power_classes.hpp"

namespace {

const char* const kFields[] = {"Q2", "Q2_sqrt2", "Q4_sqrt2", "Q3_zeta3"};

void power_keys_bench(benchmark::State& state, bklab::Exec exec) {
  const auto F = bklab::LocalField::make(kFields[state.range(0)]);
  const int L = static_cast<int>(F->eprime().floor()) + 2;
  state.SetLabel(F->name() + " L=" + std::to_string(L));
  for (auto _ : state) benchmark::DoNotOptimize(bklab::power_keys(*F, L, F->p(), exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bklab::key_space(*F, L - 1)));
}

void hilbert_bench(benchmark::State& state, bklab::Exec exec) {
  const auto F = bklab::LocalField::make(kFields[state.range(0)]);
  state.SetLabel(F->name());
  for (auto _ : state) {
    const bklab::HilbertOracle H(F, exec);
    benchmark::DoNotOptimize(H.gram());
  }
}

void BM_PowerKeysSerial(benchmark::State& s) { power_keys_bench(s, bklab::Exec::serial); }
void BM_PowerKeysParallel(benchmark::State& s) { power_keys_bench(s, bklab::Exec::parallel); }
void BM_HilbertSerial(benchmark::State& s) { hilbert_bench(s, bklab::Exec::serial); }
void BM_HilbertParallel(benchmark::State& s) { hilbert_bench(s, bklab::Exec::parallel); }

}  // namespace

BENCHMARK(BM_PowerKeysSerial)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PowerKeysParallel)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HilbertSerial)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HilbertParallel)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
