#include <benchmark/benchmark.h>

#include "rde/adf.hpp"
#include "rde/mc.hpp"
#include "rde/ordering.hpp"
#include "rde/synthetic.hpp"

namespace {

using namespace rde;

// A digit-sized problem: 784 inputs, two hidden layers.
struct Problem {
  NeuralNetwork net;
  GaussianReference diag;
  GaussianReference low;
  Vector x;
  RelevanceScores s;

  explicit Problem(std::size_t d)
      : net(synthetic::random_network({d, {128, 64}, 10, 1.5, 0.1}, 1)),
        diag(synthetic::random_diagonal_reference(d, 2)),
        low(synthetic::random_low_rank_reference(d, 30, 3)),
        x(synthetic::uniform_vector(d, 4)),
        s(synthetic::uniform_vector(d, 5)) {}
};

const Problem& problem(std::size_t d) {
  static const Problem small(64);
  static const Problem large(784);
  return d <= 64 ? small : large;
}

void BM_Forward(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward(p.net, p.x));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(784);

void BM_AdfDiagonal(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(adf_distortion(p.net, p.diag, p.x, p.s, CovarianceMode::kDiagonal));
  }
}
BENCHMARK(BM_AdfDiagonal)->Arg(64)->Arg(784);

void BM_AdfLowRank(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(adf_distortion(p.net, p.low, p.x, p.s, CovarianceMode::kLowRank));
  }
}
BENCHMARK(BM_AdfLowRank)->Arg(64)->Arg(784);

void BM_GradientDiagonal(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(adf_distortion_gradient(p.net, p.diag, p.x, p.s, CovarianceMode::kDiagonal));
  }
}
BENCHMARK(BM_GradientDiagonal)->Arg(64)->Arg(784);

void BM_GradientLowRank(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(adf_distortion_gradient(p.net, p.low, p.x, p.s, CovarianceMode::kLowRank));
  }
}
BENCHMARK(BM_GradientLowRank)->Arg(64)->Arg(784);

void BM_MonteCarlo(benchmark::State& state) {
  const Problem& p = problem(784);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc_distortion(p.net, p.diag, p.x, p.s, samples, 7));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_OrderingCurve(benchmark::State& state) {
  const Problem& p = problem(64);
  OrderingOptions options;
  options.rates = uniform_rates(64);
  options.samples = 128;
  std::vector<std::size_t> order(64);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_ordering(p.net, p.diag, p.x, order, options));
}
BENCHMARK(BM_OrderingCurve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
