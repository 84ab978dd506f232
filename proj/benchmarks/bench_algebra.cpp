#include <benchmark/benchmark.h>

#include <random>

#include "lattab/algebra.hpp"
#include "lattab/pudlak.hpp"

namespace {

lattab::UnaryAlgebra random_algebra(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<lattab::Transformation> gens(2, lattab::Transformation(n));
  for (auto& f : gens)
    for (auto& v : f) v = static_cast<lattab::Node>(rng() % n);
  return lattab::close_composition(n, gens, {.adjoin_identity = true});
}

void BM_CongruenceLattice(benchmark::State& state) {
  auto const A = random_algebra(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::congruence_lattice(A));
}
BENCHMARK(BM_CongruenceLattice)->DenseRange(3, 6);

void BM_Endomorphisms(benchmark::State& state) {
  auto const t = lattab::dual_congruence_table(random_algebra(static_cast<std::size_t>(state.range(0)), 9));
  for (auto _ : state) benchmark::DoNotOptimize(lattab::endomorphisms(t, 10000000));
}
BENCHMARK(BM_Endomorphisms)->DenseRange(3, 6);

void BM_MaltsevStage1(benchmark::State& state, char const* name) {
  auto const t = lattab::table_of(lattab::build_homogenized(lattab::catalog_lattice(name), 1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::check_maltsev(t));
}
BENCHMARK_CAPTURE(BM_MaltsevStage1, B2, "B2")->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_SweepStage1In2(benchmark::State& state, char const* name) {
  auto const g = lattab::build_homogenized(lattab::catalog_lattice(name), 2);
  auto const small = lattab::table_of(g, 1), big = lattab::table_of(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lattab::homogeneity_sweep(big, small, 20000));
}
BENCHMARK_CAPTURE(BM_SweepStage1In2, B2, "B2")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepStage1In2, N5, "N5")->Unit(benchmark::kMillisecond);

}  // namespace
