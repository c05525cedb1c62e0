// Serial vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include <vector>

#include "procwatt/kernels.hpp"

using namespace procwatt;
using namespace procwatt::kernels;

namespace {

PlacementInstance instance(std::size_t machines, std::size_t vnfs) {
  PlacementInstance inst;
  for (std::size_t m = 0; m < machines; ++m) {
    inst.profiles.push_back(m % 2 ? PowerProfile::linear(9.0 + m, 0.05)
                                  : PowerProfile::nroot(8.0 + m, 0.5, 2 + static_cast<int>(m)));
    inst.base_competition.push_back(5.0 * static_cast<double>(m));
  }
  inst.slice_count = 2;
  for (std::size_t j = 0; j < vnfs; ++j) {
    inst.shares.push_back(3.0 + static_cast<double>(j % 5));
    inst.slice_of.push_back(j % 2);
  }
  return inst;
}

SynthesisPlan plan() {
  SynthesisPlan p;
  for (int i = 0; i < 20; ++i) {
    p.levels.push_back(5.0 * i);
    p.level_power.push_back(9.75 + 0.055 * 5.0 * i);
  }
  p.samples_per_level = 72;
  p.cycles = 64;
  p.sample_interval = 5.0;
  p.noise_sigma = 0.3;
  p.seed = 7;
  return p;
}

template <Backend B>
void BM_exhaustive(benchmark::State& state) {
  const auto inst = instance(4, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_search(inst, B));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(configuration_count(4, inst.vnf_count())));
}

template <Backend B>
void BM_difference(benchmark::State& state) {
  std::vector<double> grid;
  for (std::int64_t i = 0; i <= state.range(0); ++i) grid.push_back(100.0 * i / state.range(0));
  const LinearProfile lin{8.0, 0.05};
  const NRootProfile root{6.0, 1.2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(difference_on_grid(lin, root, grid, B));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

template <Backend B>
void BM_synthesize(benchmark::State& state) {
  const auto p = plan();
  std::vector<TraceSample> out(p.sample_count());
  for (auto _ : state) {
    synthesize(p, out, B);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

}  // namespace

BENCHMARK(BM_exhaustive<Backend::serial>)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_exhaustive<Backend::openmp>)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_difference<Backend::serial>)->Arg(1024)->Arg(1 << 20);
BENCHMARK(BM_difference<Backend::openmp>)->Arg(1024)->Arg(1 << 20);
BENCHMARK(BM_synthesize<Backend::serial>);
BENCHMARK(BM_synthesize<Backend::openmp>);

BENCHMARK_MAIN();
