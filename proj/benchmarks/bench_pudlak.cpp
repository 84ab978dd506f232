#include <benchmark/benchmark.h>

#include "lattab/morphism.hpp"
#include "lattab/pudlak.hpp"

namespace {

void BM_BuildHomogenized(benchmark::State& state, char const* name) {
  auto const L = lattab::catalog_lattice(name);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::build_homogenized(L, 2));
}
BENCHMARK_CAPTURE(BM_BuildHomogenized, three_chain, "3-chain")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildHomogenized, B2, "B2")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildHomogenized, M3, "M3")->Unit(benchmark::kMillisecond);

void BM_StageTable(benchmark::State& state) {
  auto const g = lattab::build_homogenized(lattab::catalog_lattice("N5"), 2);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::table_of(g, 2));
}
BENCHMARK(BM_StageTable)->Unit(benchmark::kMillisecond);

void BM_EmbedHomogenized(benchmark::State& state) {
  auto const phi = *lattab::canonical_hom(lattab::catalog_lattice("3-chain"), lattab::catalog_lattice("N5"));
  for (auto _ : state) benchmark::DoNotOptimize(lattab::embed_homogenized(phi, 1));
}
BENCHMARK(BM_EmbedHomogenized)->Unit(benchmark::kMillisecond);

}  // namespace
