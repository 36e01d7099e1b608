#include <benchmark/benchmark.h>

#include <memory>

#include "biobench/apps.hpp"

namespace {

using namespace biobench;

// One full acquisition window through the pipeline, model built once up
// front the way a deployed firmware image would hold it.
void run_window(benchmark::State& state, AppId app) {
  const auto config = apps::default_config(app);
  const auto pipeline = apps::build_app(config);
  const auto input = apps::synthesize_input(config, 1);
  for (auto _ : state) {
    auto result = pipeline->process_window(input);
    benchmark::DoNotOptimize(result.score);
  }
}

void BM_AppHcl(benchmark::State& state) { run_window(state, AppId::HCL); }
BENCHMARK(BM_AppHcl);

void BM_AppSeizDetSvm(benchmark::State& state) {
  run_window(state, AppId::SeizDetSVM);
}
BENCHMARK(BM_AppSeizDetSvm);

void BM_AppSeizDetCnn(benchmark::State& state) {
  run_window(state, AppId::SeizDetCNN);
}
BENCHMARK(BM_AppSeizDetCnn);

void BM_AppCwm(benchmark::State& state) { run_window(state, AppId::CWM); }
BENCHMARK(BM_AppCwm);

void BM_AppGcl(benchmark::State& state) { run_window(state, AppId::GCL); }
BENCHMARK(BM_AppGcl);

void BM_AppCoughDet(benchmark::State& state) {
  run_window(state, AppId::CoughDet);
}
BENCHMARK(BM_AppCoughDet);

void BM_AppEcl(benchmark::State& state) { run_window(state, AppId::ECL); }
BENCHMARK(BM_AppEcl);

void BM_AppBpfree(benchmark::State& state) {
  run_window(state, AppId::BPfree);
}
BENCHMARK(BM_AppBpfree);

}  // namespace
