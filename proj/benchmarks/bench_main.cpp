#include "bagvar/bagging.hpp"
#include "bagvar/bootstrap.hpp"
#include "bagvar/generators.hpp"
#include "bagvar/tree.hpp"
#include "bagvar/variance.hpp"

#include <benchmark/benchmark.h>

using namespace bagvar;

namespace {

ResamplePlan make_plan(std::size_t n, std::size_t b) {
  ResamplePlan p;
  p.n = n;
  p.replicates = b;
  p.seed = 1;
  return p;
}

Dataset cosine(std::size_t n) {
  GeneratorSpec spec;
  spec.n = n;
  spec.seed = 2;
  return generate(spec);
}

ResampleTrace bagged_trace(std::size_t n, std::size_t b, std::size_t q) {
  const Dataset data = cosine(n);
  LearnerSpec spec;
  spec.max_leaves = 16;
  const QueryMatrix queries = sample_features(GeneratorKind::cosine, q, 2, 3);
  return bag_predict(data, *make_learner(spec), make_plan(n, b), queries).trace;
}

void BM_DrawCounts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto plan = make_plan(n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(draw_resample_counts(plan));
  state.SetItemsProcessed(state.iterations() * 1000 * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_DrawCounts)->Arg(100)->Arg(1000);

void BM_TreeFit(benchmark::State& state) {
  const Dataset data = cosine(static_cast<std::size_t>(state.range(0)));
  TreeParams params;
  params.mtry = 1;
  params.min_leaf = 5;
  for (auto _ : state) benchmark::DoNotOptimize(fit_regression_tree(data, params));
}
BENCHMARK(BM_TreeFit)->Arg(50)->Arg(500)->Arg(5000);

void BM_EstimateAll(benchmark::State& state) {
  const ResampleTrace trace = bagged_trace(200, 2000, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_all(trace));
}
BENCHMARK(BM_EstimateAll)->Arg(1)->Arg(50);

void BM_PerQueryKernels(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  const ResampleTrace trace = bagged_trace(200, 2000, q);
  for (auto _ : state) {
    for (std::size_t k = 0; k < q; ++k) {
      benchmark::DoNotOptimize(ij_unbiased(trace, k));
      benchmark::DoNotOptimize(jackknife_unbiased(trace, k));
    }
  }
}
BENCHMARK(BM_PerQueryKernels)->Arg(1)->Arg(50);

void BM_BagPredict(benchmark::State& state) {
  const Dataset data = cosine(200);
  const auto learner = make_learner({});
  const QueryMatrix queries = training_queries(data);
  for (auto _ : state) benchmark::DoNotOptimize(bag_predict(data, *learner, make_plan(200, 200), queries));
}
BENCHMARK(BM_BagPredict);

}  // namespace
BENCHMARK_MAIN();
