#include <benchmark/benchmark.h>

#include <quadfeat/rng.hpp>
#include <quadfeat/structured.hpp>

#include <Eigen/Dense>

using namespace quadfeat;

namespace {

Eigen::VectorXd random_vector(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
  return x;
}

void bm_butterfly_apply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ButterflyOrthogonal b = ButterflyOrthogonal::sample(d, 1);
  const Eigen::VectorXd x = random_vector(d, 2);
  Eigen::VectorXd y(d);
  for (auto _ : state) {
    b.apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(d);
}
BENCHMARK(bm_butterfly_apply)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void bm_dense_apply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const DenseOrthogonal q(haar_qr_orthogonal(d, 1));
  const Eigen::VectorXd x = random_vector(d, 2);
  Eigen::VectorXd y(d);
  for (auto _ : state) {
    q.apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(d);
}
BENCHMARK(bm_dense_apply)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void bm_fwht(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::VectorXd x = random_vector(d, 3);
  for (auto _ : state) {
    Eigen::VectorXd y = fwht_normalized(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(d);
}
BENCHMARK(bm_fwht)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void bm_butterfly_sample(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ButterflyOrthogonal b = ButterflyOrthogonal::sample(d, ++seed);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(bm_butterfly_sample)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
