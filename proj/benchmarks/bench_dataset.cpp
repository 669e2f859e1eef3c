#include <benchmark/benchmark.h>

#include <sstream>

#include "anycap/dataset.hpp"
#include "bench_common.hpp"

namespace {

using namespace anycap;

std::vector<Any2CapRecord> records(std::size_t n) {
  std::mt19937_64 rng(8);
  std::vector<Any2CapRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    Any2CapRecord r;
    r.id = "r" + std::to_string(i);
    r.video_ref = r.id + ".mp4";
    r.duration_s = 5.0 + static_cast<double>(i % 20);
    r.category = Category::kCamera;
    Condition c;
    c.kind = ConditionKind::kCamera;
    c.refs = {r.id + ".traj"};
    r.conditions.add(c);
    r.short_caption = ShortPrompt(bench::random_text(rng, 50, 400) + ".");
    r.structured_caption.set(Component::kDense, bench::random_text(rng, 200, 400) + ".");
    r.structured_caption.set(Component::kCamera, bench::random_text(rng, 30, 400) + ".");
    out.push_back(std::move(r));
  }
  return out;
}

void BM_RecordRoundTrip(benchmark::State& state) {
  const auto recs = records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::stringstream ss;
    write_records(recs, ss);
    benchmark::DoNotOptimize(read_records(ss));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Stats(benchmark::State& state) {
  const auto recs = records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_stats(recs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RecordRoundTrip)->Arg(1000);
BENCHMARK(BM_Stats)->Arg(1000);
