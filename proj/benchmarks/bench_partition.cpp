#include <benchmark/benchmark.h>

#include <random>

#include "lattab/partition.hpp"

namespace {

lattab::EqRel random_rel(std::mt19937_64& rng, std::size_t n, std::size_t blocks) {
  std::vector<std::uint32_t> labels(n);
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % blocks);
  return lattab::EqRel::from_labels(labels);
}

void BM_PartJoin(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto const n = static_cast<std::size_t>(state.range(0));
  auto const p = random_rel(rng, n, n / 4 + 1), q = random_rel(rng, n, n / 4 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::part_join(p, q));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartJoin)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_PartMeet(benchmark::State& state) {
  std::mt19937_64 rng(2);
  auto const n = static_cast<std::size_t>(state.range(0));
  auto const p = random_rel(rng, n, n / 4 + 1), q = random_rel(rng, n, n / 4 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::part_meet(p, q));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartMeet)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

}  // namespace
