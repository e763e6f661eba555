#include <benchmark/benchmark.h>

#include "diffnet/estimate.hpp"
#include "diffnet/mc.hpp"

using namespace diffnet;

namespace {

struct Fixture {
  PanelData panel;
  ProbitFit fit_full;
  ProbitFit fit_omit;
  InfluenceSet inf;

  explicit Fixture(int villages) {
    DgpConfig cfg;
    cfg.n_villages = villages;
    const DgpRealization real = gen_dgp(cfg, RngStream(11, mc_streams::kRealization));
    panel = draw_panel(real, cfg, RngStream(11, mc_streams::kReplication).derive(0));
    fit_full = probit_fit(panel.X, panel.y0);
    Matrix design(panel.X.rows(), 3);
    for (int i = 0; i < panel.X.rows(); ++i)
      for (int k = 0; k < 3; ++k) design(i, k) = panel.X(i, k);
    fit_omit = probit_fit(design, panel.y0);
    fit_omit.columns = {0, 1, 2};
    inf = influence(panel.observed, panel.X, panel.y0, panel.y1, fit_full, fit_omit);
  }
};

const Fixture& fixture() {
  static Fixture f(30);  // n = 1500
  return f;
}

}  // namespace

static void BM_ProbitFit(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(probit_fit(f.panel.X, f.panel.y0));
  }
}
BENCHMARK(BM_ProbitFit);

static void BM_Influence(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        influence(f.panel.observed, f.panel.X, f.panel.y0, f.panel.y1, f.fit_full, f.fit_omit));
  }
}
BENCHMARK(BM_Influence);

static void BM_VariancePairSum(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(variance(f.panel.observed, f.inf));
  }
}
BENCHMARK(BM_VariancePairSum);

static void BM_Decompose(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose(f.panel, {3}, 0.95, f.fit_full));
  }
}
BENCHMARK(BM_Decompose);
