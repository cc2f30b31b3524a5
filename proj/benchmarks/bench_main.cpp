#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "ppkg/cluster.hpp"
#include "ppkg/dimred.hpp"
#include "ppkg/layout.hpp"
#include "ppkg/metrics.hpp"

using namespace ppkg;

namespace {

void BM_SpringLayout(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const PolicyGraph g = fixtures::synthetic_policy(n, 2 * n, 1);
  LayoutParams p;
  p.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(spring_layout(g, p));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SpringLayout)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

EmbeddingMatrix random_embedding(Eigen::Index n) {
  Rng rng(7);
  return fixtures::embedding(fixtures::random_matrix(n, 10, rng));
}

void BM_Tsne(benchmark::State& state) {
  const EmbeddingMatrix x = random_embedding(state.range(0));
  TsneParams p;
  p.seed = 2;
  for (auto _ : state) benchmark::DoNotOptimize(tsne(x, p));
}
BENCHMARK(BM_Tsne)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Umap(benchmark::State& state) {
  const EmbeddingMatrix x = random_embedding(state.range(0));
  UmapParams p;
  p.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(umap(x, p));
}
BENCHMARK(BM_Umap)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Hdbscan(benchmark::State& state) {
  Rng rng(4);
  const Matrix x = fixtures::random_matrix(state.range(0), 2, rng, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(hdbscan_labels(x, 5));
}
BENCHMARK(BM_Hdbscan)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Silhouette(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = fixtures::random_matrix(state.range(0), 2, rng);
  const auto labels = fixtures::random_labels(n, 5, rng);
  for (auto _ : state) benchmark::DoNotOptimize(silhouette(x, labels));
}
BENCHMARK(BM_Silhouette)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
