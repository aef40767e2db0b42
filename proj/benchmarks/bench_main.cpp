#include <benchmark/benchmark.h>

#include <vector>

#include "pmc/purcell.hpp"
#include "pmc/spectral_analysis.hpp"
#include "pmc/transmission.hpp"

namespace {

using namespace pmc;

HybridSystem row1() {
  return make_system(5.33e9, 4.688e-3, 0.5e6, 5.33e9, 1.4e-5, 10e6, 127.3e6);
}

void BM_Eigenmodes(benchmark::State& state) {
  auto sys = row1();
  for (auto _ : state) {
    sys.g += 1.0;
    benchmark::DoNotOptimize(eigenmodes(sys));
  }
}
BENCHMARK(BM_Eigenmodes);

void BM_Spectrum(benchmark::State& state) {
  const auto sys = row1();
  const FrequencyGrid grid{4.8e9, 5.9e9, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(sys, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Spectrum)->Arg(2001)->Arg(20001);

void BM_FieldSweep(benchmark::State& state) {
  const auto sys = row1();
  std::vector<double> fields;
  for (int k = 0; k < 101; ++k) fields.push_back(1000 + 5.0 * k);
  for (auto _ : state)
    benchmark::DoNotOptimize(field_sweep(sys, {}, fields, {}, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_FieldSweep)->Arg(1)->Arg(0);

void BM_TimeDomain(benchmark::State& state) {
  const auto spec = spectrum(row1(), {4.33e9, 6.33e9, 4001});
  for (auto _ : state) benchmark::DoNotOptimize(time_domain(spec, Window::none, 4));
}
BENCHMARK(BM_TimeDomain);

void BM_FindPeaks(benchmark::State& state) {
  const auto spec = spectrum(row1(), {});
  for (auto _ : state) benchmark::DoNotOptimize(find_peaks(spec));
}
BENCHMARK(BM_FindPeaks);

void BM_Fit(benchmark::State& state) {
  const auto truth = row1();
  const FrequencyGrid grid{4.8e9, 5.9e9, 1101};
  const auto data = spectrum(truth, grid).magnitudes();
  auto init = truth;
  init.g *= 0.8;
  init.photon.intrinsic_damping *= 1.2;
  const auto mask = FreeMask::of({FitParameter::g, FitParameter::alpha, FitParameter::beta});
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(grid, data, init, mask));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

void BM_PhaseDiagram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n), g(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = 1e-5 + 3e-2 * static_cast<double>(k) / static_cast<double>(n);
    b[k] = 1e-3 + 1e-2 * static_cast<double>(k) / static_cast<double>(n);
    g[k] = 1e6 + 2e8 * static_cast<double>(k) / static_cast<double>(n);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(phase_diagram(a, b, g, units::angular(5.33e9)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_PhaseDiagram)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
