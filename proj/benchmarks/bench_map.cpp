#include <benchmark/benchmark.h>

#include <quadfeat/experiment.hpp>
#include <quadfeat/kernels.hpp>
#include <quadfeat/quadrature.hpp>
#include <quadfeat/rng.hpp>

#include <Eigen/Dense>

using namespace quadfeat;

namespace {

Eigen::MatrixXd random_rows(int rows, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(rows, d);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.gaussian();
  return x;
}

// feature-map throughput at matched accounted dimension D = 2n(d+1)+1
void bm_map_rows(benchmark::State& state, Method method) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const int rows = 64;
  const KernelKind kernel = KernelKind::gaussian(1.0 / d);
  const AnyMapper mapper = build_mapper(method, kernel, d, n, 7);
  const Eigen::MatrixXd x = random_rows(rows, d, 11);
  for (auto _ : state) {
    Eigen::MatrixXd z = mapper_map_rows(mapper, x);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations() * rows);
}

void bm_map_sr33_butterfly(benchmark::State& state) {
  bm_map_rows(state, Method::Sr33Butterfly);
}
void bm_map_sr33_haarqr(benchmark::State& state) {
  bm_map_rows(state, Method::Sr33HaarQr);
}
void bm_map_g(benchmark::State& state) { bm_map_rows(state, Method::G); }
void bm_map_rom(benchmark::State& state) { bm_map_rows(state, Method::Rom); }
void bm_map_qmc(benchmark::State& state) { bm_map_rows(state, Method::Qmc); }

BENCHMARK(bm_map_sr33_butterfly)->ArgsProduct({{64, 256, 1024}, {1, 3}});
BENCHMARK(bm_map_sr33_haarqr)->ArgsProduct({{64, 256}, {1, 3}});
BENCHMARK(bm_map_g)->ArgsProduct({{64, 256, 1024}, {1, 3}});
BENCHMARK(bm_map_rom)->ArgsProduct({{64, 256, 1024}, {1, 3}});
BENCHMARK(bm_map_qmc)->ArgsProduct({{64, 256}, {1, 3}});

void bm_sample_sr33(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const OrthogonalSampler src{QSource::Butterfly, 5};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SRSample s = sample_sr33(d, ++seed, src);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_sample_sr33)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace
