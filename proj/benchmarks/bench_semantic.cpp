#include <benchmark/benchmark.h>

#include "anycap/embedding.hpp"
#include "anycap/semantic_metrics.hpp"
#include "bench_common.hpp"

namespace {

using namespace anycap;

void BM_BertScore(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  MockProvider provider(static_cast<std::size_t>(state.range(1)), 7);
  const std::string cand = bench::random_text(rng, n, 300), ref = bench::random_text(rng, n, 300);
  for (auto _ : state) benchmark::DoNotOptimize(bertscore(cand, ref, provider));
}

// Matching alone, on precomputed vectors.
void BM_GreedyMatch(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  MockProvider provider(768, 9);
  const auto cand = provider.embed_tokens(bench::random_text(rng, n, 300));
  const auto ref = provider.embed_tokens(bench::random_text(rng, n, 300));
  for (auto _ : state) benchmark::DoNotOptimize(greedy_match(cand, ref));
}

}  // namespace

BENCHMARK(BM_BertScore)->Args({32, 64})->Args({128, 64})->Args({128, 768});
BENCHMARK(BM_GreedyMatch)->Arg(32)->Arg(128)->Arg(512);
