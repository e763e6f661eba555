#include <benchmark/benchmark.h>

#include "diffnet/mc.hpp"
#include "diffnet/simulate.hpp"

using namespace diffnet;

namespace {

const DgpRealization& realization() {
  static DgpRealization real = [] {
    DgpConfig cfg;
    return gen_dgp(cfg, RngStream(13, mc_streams::kRealization));
  }();
  return real;
}

}  // namespace

static void BM_Diffuse(benchmark::State& state) {
  const DgpRealization& real = realization();
  DgpConfig cfg;
  const std::vector<int> y0 = gen_initial(real.X, cfg.gamma0, RngStream(13, 1));
  std::uint64_t draw = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        diffuse(real.contact, real.X, cfg.beta0, cfg.delta0, cfg.t1, y0, RngStream(13, ++draw)));
  }
}
BENCHMARK(BM_Diffuse);

static void BM_AdmOracleDraws(benchmark::State& state) {
  const DgpRealization& real = realization();
  DgpConfig cfg;
  const int draws = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(adm_oracle(real.contact, real.X, cfg.gamma0, cfg.beta0, cfg.delta0,
                                        cfg.t1, draws, RngStream(13, 2), 1));
  }
  state.SetItemsProcessed(state.iterations() * draws);
}
BENCHMARK(BM_AdmOracleDraws)->Arg(64);

static void BM_DeltaOracleDraws(benchmark::State& state) {
  const DgpRealization& real = realization();
  DgpConfig cfg;
  const int draws = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_oracle(real.contact, real.observed, real.X, cfg.gamma0,
                                          cfg.beta0, cfg.delta0, cfg.t1, {3}, draws,
                                          RngStream(13, 3), 1));
  }
  state.SetItemsProcessed(state.iterations() * draws);
}
BENCHMARK(BM_DeltaOracleDraws)->Arg(64);

static void BM_GenCovariates(benchmark::State& state) {
  const DgpRealization& real = realization();
  DgpConfig cfg;
  std::uint64_t draw = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_covariates(real.contact, cfg, RngStream(13, 100 + ++draw)));
  }
}
BENCHMARK(BM_GenCovariates);
