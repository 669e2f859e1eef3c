#include <benchmark/benchmark.h>

#include "anycap/text_metrics.hpp"
#include "bench_common.hpp"

namespace {

using namespace anycap;

// Caption-length pairs: argument is the token count of each side.
template <typename Metric>
void run_pair(benchmark::State& state, Metric metric) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cand = bench::random_tokens(rng, n, 200), ref = bench::random_tokens(rng, n, 200);
  for (auto _ : state) benchmark::DoNotOptimize(metric(cand, ref));
  state.SetItemsProcessed(state.iterations());
}

void BM_Bleu2(benchmark::State& s) { run_pair(s, [](const auto& c, const auto& r) { return bleu_n(c, r, 2); }); }
void BM_RougeL(benchmark::State& s) { run_pair(s, [](const auto& c, const auto& r) { return rouge_l(c, r); }); }
void BM_Meteor(benchmark::State& s) { run_pair(s, [](const auto& c, const auto& r) { return meteor(c, r); }); }

void BM_Tokenize(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::string text = bench::random_text(rng, static_cast<std::size_t>(state.range(0)), 500) + ".";
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}

void BM_PorterStem(benchmark::State& state) {
  const std::string words[] = {"running", "relational", "conditional", "hopefulness", "generalizations", "cats"};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(porter_stem(words[i++ % 6]));
}

}  // namespace

BENCHMARK(BM_Bleu2)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_RougeL)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Meteor)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Tokenize)->Arg(64)->Arg(512);
BENCHMARK(BM_PorterStem);
