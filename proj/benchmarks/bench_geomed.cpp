#include <benchmark/benchmark.h>

#include <vector>

#include "geomed/distribution.hpp"
#include "geomed/geometry_oracle.hpp"
#include "geomed/sgd_median.hpp"

namespace {

using namespace geomed;

std::vector<Vector> gaussian(int dim, std::size_t count) {
  DistributionSpec spec;
  spec.dim = dim;
  spec.seed = 1;
  return sample(spec, count);
}

// One online update per iteration; throughput in observations per second.
void BM_Update(benchmark::State& state) {
  const auto dim = static_cast<int>(state.range(0));
  const auto obs = gaussian(dim, 4096);
  const StepSchedule sched;
  auto s = init(obs[0]);
  std::size_t i = 1;
  for (auto _ : state) {
    update(s, obs[i], sched);
    i = (i + 1) % obs.size();
    benchmark::DoNotOptimize(s.z_bar.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Update)->Arg(2)->Arg(10)->Arg(100)->Arg(1000);

void BM_Weiszfeld(benchmark::State& state) {
  const SampleSet sample(gaussian(static_cast<int>(state.range(1)), static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(weiszfeld(sample).median.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Weiszfeld)->Args({1000, 5})->Args({100000, 5})->Args({10000, 50})->Unit(benchmark::kMillisecond);

void BM_Hessian(benchmark::State& state) {
  const SampleSet sample(gaussian(static_cast<int>(state.range(1)), static_cast<std::size_t>(state.range(0))));
  const Vector h = Vector::Constant(sample.dim(), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(hessian(sample, h).lambda_min);
}
BENCHMARK(BM_Hessian)->Args({10000, 5})->Args({2000, 100})->Unit(benchmark::kMillisecond);

void BM_LambdaMinIdentity(benchmark::State& state) {
  const SampleSet sample(gaussian(static_cast<int>(state.range(1)), static_cast<std::size_t>(state.range(0))));
  const Vector h = Vector::Constant(sample.dim(), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_min_estimate(sample, h));
}
BENCHMARK(BM_LambdaMinIdentity)->Args({10000, 5})->Args({2000, 100})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
