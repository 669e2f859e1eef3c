#include <benchmark/benchmark.h>

#include <Eigen/Geometry>
#include <random>

#include "anycap/camera.hpp"

namespace {

using namespace anycap;

CameraTrajectory trajectory(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CameraTrajectory t;
  t.width = t.height = 256;
  for (std::size_t i = 0; i < frames; ++i) {
    CameraPose p;
    p.rotation = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
    p.translation = Eigen::Vector3d(g(rng), g(rng), g(rng));
    p.intrinsics = {200, 200, 128, 128};
    t.frame_indices.push_back(static_cast<std::int64_t>(i));
    t.poses.push_back(p);
  }
  return t;
}

// Frames x (H = W).
void BM_Pluecker(benchmark::State& state) {
  const auto traj = trajectory(static_cast<std::size_t>(state.range(0)), 5);
  const auto side = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pluecker_embedding(traj, side, side));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * state.range(1));
}

void BM_CameraMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normalize_to_first(trajectory(n, 6)), b = normalize_to_first(trajectory(n, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rot_err(a, b));
    benchmark::DoNotOptimize(trans_err(a, b));
    benchmark::DoNotOptimize(cam_mc(a, b));
  }
}

}  // namespace

BENCHMARK(BM_Pluecker)->Args({16, 16})->Args({16, 64})->Args({49, 64})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CameraMetrics)->Arg(16)->Arg(256);
