#include <benchmark/benchmark.h>

#include "macsim/linkage.hpp"

using namespace macsim;

namespace {

MUGParams bench_params(size_t vars) {
  MUGParams p;
  p.m.assign(vars, 0.8);
  p.u.assign(vars, 0.2);
  p.g.assign(vars, 0.1);
  return p;
}

void BM_CompositeWeights(benchmark::State& state) {
  const auto rows = static_cast<size_t>(state.range(0));
  const size_t cols = 400, vars = 7;
  const MUGParams params = bench_params(vars);
  const AgreementMatrix matrix = sample_matrix(rows, cols, params, 5);
  const WeightTable table = weight_table(params);
  for (auto _ : state) {
    WeightMatrix w = composite_weights(matrix, table);
    benchmark::DoNotOptimize(w.w.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rows * cols * vars));
}
BENCHMARK(BM_CompositeWeights)->Arg(6)->Arg(59);

void BM_GreedyLink(benchmark::State& state) {
  const auto rows = static_cast<size_t>(state.range(0));
  const size_t cols = 400, vars = 7;
  const MUGParams params = bench_params(vars);
  const AgreementMatrix matrix = sample_matrix(rows, cols, params, 6);
  const WeightMatrix w = composite_weights(matrix, weight_table(params));
  for (auto _ : state) {
    LinkSet links = greedy_link(w, 0.0);
    benchmark::DoNotOptimize(links.links.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rows * cols));
}
BENCHMARK(BM_GreedyLink)->Arg(6)->Arg(59);

// Sweeping many cutoffs over one ranking, the pattern the cutoff sweep uses.
void BM_RankOnceLinkMany(benchmark::State& state) {
  const size_t rows = 59, cols = 400, vars = 7;
  const MUGParams params = bench_params(vars);
  const AgreementMatrix matrix = sample_matrix(rows, cols, params, 7);
  const PairRanking ranking(composite_weights(matrix, weight_table(params)));
  for (auto _ : state) {
    for (int c = -15; c <= 20; ++c) {
      LinkSet links = ranking.link(static_cast<double>(c));
      benchmark::DoNotOptimize(links.links.data());
    }
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * 36));
}
BENCHMARK(BM_RankOnceLinkMany);

}  // namespace

BENCHMARK_MAIN();
