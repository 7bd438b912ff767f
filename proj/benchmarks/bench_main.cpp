#include <benchmark/benchmark.h>

#include "contact/essential_hitting.hpp"
#include "contact/prf.hpp"
#include "contact/random_field.hpp"
#include "contact/simulate.hpp"
#include "engine.hpp"

namespace bm = benchmark;
using namespace contact;

static void BM_ArrivalStream(bm::State& st) {
  HarrisField field(1, 1, 3.0);
  const double horizon = static_cast<double>(st.range(0));
  uint64_t key = 0;
  for (auto _ : st) {
    ArrivalCursor cur = field.cursor(ClockKey::edge_clock(Site{static_cast<int32_t>(key++ % 1000)}, 0));
    long n = 0;
    while (cur.time() <= horizon) {
      ++n;
      cur.next();
    }
    bm::DoNotOptimize(n);
  }
}
BENCHMARK(BM_ArrivalStream)->Arg(10)->Arg(100)->Arg(1000);

static void BM_SingleTrajectory(bm::State& st) {
  const double horizon = static_cast<double>(st.range(0));
  const Window w{static_cast<int>(4.0 * horizon) + 2, BoundaryPolicy::flag};
  uint64_t seed = 0;
  for (auto _ : st) {
    HarrisField field(prf::derive_seed(7, seed++), 1, 3.0);
    Trajectory t = simulate(field, 2.0, {Site::origin()}, w, horizon);
    bm::DoNotOptimize(t.final_config.size());
  }
}
BENCHMARK(BM_SingleTrajectory)->Arg(20)->Arg(50)->Arg(150)->Unit(bm::kMillisecond);

static void BM_CoupledScanReplay(bm::State& st) {
  const int n_lambda = static_cast<int>(st.range(0));
  std::vector<double> grid;
  for (int i = 0; i < n_lambda; ++i) grid.push_back(1.8 + 1.2 * i / std::max(1, n_lambda - 1));
  const Window w{300, BoundaryPolicy::flag};
  uint64_t seed = 0;
  for (auto _ : st) {
    HarrisField field(prf::derive_seed(11, seed++), 1, 3.0);
    auto m = simulate_coupled(field, grid, {Site::origin()}, w, 60.0);
    bm::DoNotOptimize(m.size());
  }
}
BENCHMARK(BM_CoupledScanReplay)->Arg(1)->Arg(7)->Arg(13)->Unit(bm::kMillisecond);

static void BM_SurvivalProxy(bm::State& st) {
  SurvivalPolicy pol;
  pol.t_surv = static_cast<double>(st.range(0));
  uint64_t seed = 0;
  for (auto _ : st) {
    HarrisField field(prf::derive_seed(13, seed++), 1, 3.0);
    bm::DoNotOptimize(survival_proxy(field, 2.0, Site::origin(), 0.0, pol).survives);
  }
}
BENCHMARK(BM_SurvivalProxy)->Arg(50)->Arg(150)->Unit(bm::kMillisecond);

BENCHMARK_MAIN();
