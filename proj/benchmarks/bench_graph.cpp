#include <benchmark/benchmark.h>

#include "diffnet/graph.hpp"

using namespace diffnet;

namespace {

DirectedGraph study_contact(int villages, int size) {
  std::vector<DirectedGraph> blocks;
  RngStream rng(7, 0);
  for (int v = 0; v < villages; ++v) {
    BaVillageConfig cfg;
    cfg.village_size = size;
    blocks.push_back(gen_ba_village(cfg, rng.derive(v)));
  }
  return block_diagonal(blocks);
}

}  // namespace

static void BM_CausalGraph(benchmark::State& state) {
  const DirectedGraph contact = study_contact(static_cast<int>(state.range(0)), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(causal_graph(contact, 2));
  }
}
BENCHMARK(BM_CausalGraph)->Arg(30)->Arg(120);

static void BM_ObservedFromContact(benchmark::State& state) {
  const DirectedGraph contact = study_contact(static_cast<int>(state.range(0)), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(observed_from_contact(contact, 2));
  }
}
BENCHMARK(BM_ObservedFromContact)->Arg(30)->Arg(120);

static void BM_OverlappingPairIteration(benchmark::State& state) {
  const DirectedGraph observed =
      observed_from_contact(study_contact(static_cast<int>(state.range(0)), 50), 2);
  for (auto _ : state) {
    std::int64_t pairs = 0;
    for_each_overlapping_pair(observed, [&](int, int) { ++pairs; });
    benchmark::DoNotOptimize(pairs);
  }
}
BENCHMARK(BM_OverlappingPairIteration)->Arg(30)->Arg(120);

static void BM_GraphStats(benchmark::State& state) {
  const DirectedGraph observed = observed_from_contact(study_contact(30, 50), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats(observed));
  }
}
BENCHMARK(BM_GraphStats);
