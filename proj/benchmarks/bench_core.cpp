#include <benchmark/benchmark.h>

#include <random>

#include "fbcap/channel.hpp"
#include "fbcap/dp.hpp"
#include "fbcap/kalman.hpp"
#include "fbcap/rate.hpp"
#include "fbcap/sim.hpp"
#include "fbcap/stationary.hpp"
#include "fbcap/waterfill.hpp"

namespace {

using namespace fbcap;

ChannelModel model_of_order(int L) {
  if (L == 1) return build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  if (L == 2)
    return build_model(std::vector<double>{0.3, -0.2}, {0.4, 0.2}, 1.0);
  return build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0}, 1.0);
}

void BM_CovUpdate(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const ChannelModel m = model_of_order(L);
  std::mt19937 rng(1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix B(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) B(i, j) = gauss(rng);
  const Matrix K = B * B.transpose();
  PolicyStage stage{Vector::Constant(L, 0.3), 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cov_update(m, K, stage));
  }
}
BENCHMARK(BM_CovUpdate)->Arg(1)->Arg(2)->Arg(3);

void BM_RiccatiFixedPoint(benchmark::State& state) {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const auto fo = first_order_rate(0.0, 0.95, 1.0, 1.0);
  PolicyStage stage{Vector::Constant(1, fo.d), 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(riccati_fixed_point(m, stage, 1e-12));
  }
}
BENCHMARK(BM_RiccatiFixedPoint);

void BM_FirstOrderRate(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(first_order_rate(0.5, 0.95, 1.0, 1.0));
  }
}
BENCHMARK(BM_FirstOrderRate);

void BM_SolveStationaryL1(benchmark::State& state) {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_stationary(m, 1.0));
  }
}
BENCHMARK(BM_SolveStationaryL1)->Unit(benchmark::kMillisecond);

void BM_FeedforwardCapacity(benchmark::State& state) {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(feedforward_capacity(m, n, 1.0));
  }
}
BENCHMARK(BM_FeedforwardCapacity)->Arg(16)->Arg(64)->Arg(256)
    ->Unit(benchmark::kMillisecond);

void BM_ValueIterationNBlock(benchmark::State& state) {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  const int n = static_cast<int>(state.range(0));
  GridConfig cfg;
  cfg.power_hint = 1.0;
  const ShadowPrice price(0.2648);
  for (auto _ : state) {
    benchmark::DoNotOptimize(value_iteration_nblock(m, price, n, cfg));
  }
}
BENCHMARK(BM_ValueIterationNBlock)->Arg(4)->Arg(10)
    ->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const auto fo = first_order_rate(0.0, 0.95, 1.0, 1.0);
  PolicyStage stage{Vector::Constant(1, fo.d), 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(m, stage, 10000, 1));
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace
