#include <benchmark/benchmark.h>

#include <random>

#include "pdfevent/metric.hpp"
#include "pdfevent/model.hpp"
#include "pdfevent/signal.hpp"
#include "pdfevent/targets.hpp"

using namespace pdfevent;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;
  std::vector<double> x(n);
  for (auto& v : x) v = unit(rng);
  return x;
}

void BM_GaussianSmooth(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  const signal::SmoothingParams params{static_cast<double>(state.range(1)), 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(signal::gaussian_smooth(x, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianSmooth)->Args({4096, 1})->Args({4096, 10})->Args({17280, 10})->Args({17280, 100});

void BM_FindPeaks(benchmark::State& state) {
  const auto x = signal::gaussian_smooth(noise(static_cast<std::size_t>(state.range(0)), 2), {3.0, 4.0});
  const signal::PeakOptions options{static_cast<std::size_t>(state.range(1)), std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(signal::find_peaks(x, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FindPeaks)->Args({4096, 1})->Args({4096, 12})->Args({17280, 72});

void BM_EncodeRegression(benchmark::State& state) {
  targets::PdfSpec spec;
  spec.kind = targets::PdfKind::gaussian;
  spec.sigma = 50.0;
  spec.width = 401;
  spec.day_length = 17280;
  EventSet events;
  for (Step t = 1000; t + 2000 < 17280 * 3; t += 6000) events.intervals.push_back({t, t + 2000, std::nullopt});
  for (auto _ : state) benchmark::DoNotOptimize(targets::encode_regression(events, 17280 * 3, spec));
}
BENCHMARK(BM_EncodeRegression);

void BM_Edap(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<ScoredEvents> predictions;
  std::vector<EventSet> truth;
  for (int s = 0; s < 16; ++s) {
    EventSet e;
    e.series_id = std::to_string(s);
    ScoredEvents p{e.series_id, {}, {}};
    for (Step t = 100; t + 300 < 100000; t += 1000) {
      e.intervals.push_back({t, t + 300, std::nullopt});
      p.onsets.push_back({t + static_cast<Step>(rng() % 41) - 20, static_cast<double>(rng() % 1000)});
      p.offsets.push_back({t + 300 + static_cast<Step>(rng() % 41) - 20, static_cast<double>(rng() % 1000)});
    }
    truth.push_back(std::move(e));
    predictions.push_back(std::move(p));
  }
  metric::EdapConfig config;
  config.tolerances = {12, 36, 60, 90, 120, 150, 180, 240, 300, 360};
  for (auto _ : state) benchmark::DoNotOptimize(metric::edap(predictions, truth, config));
}
BENCHMARK(BM_Edap);

void BM_ModelForwardBackward(benchmark::State& state) {
  model::ModelConfig config;
  config.in_channels = 8;
  config.hidden = {8, 16, 32};
  config.kernel_size = 5;
  const auto params = model::init_parameters(config);
  const auto length = static_cast<Eigen::Index>(state.range(0));
  std::vector<model::Matrix> inputs{model::Matrix::Random(8, length)};
  std::vector<model::Matrix> targets{model::Matrix::Random(2, length)};
  for (auto _ : state) benchmark::DoNotOptimize(model::gradients(params, inputs, targets, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ModelForwardBackward)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
