// Serial vs OpenMP direct summation vs treecode on uniform blob clouds.
#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "vortexlab/kernel.hpp"

namespace {

using namespace vortexlab;

struct Cloud {
  kernel::SourceSet src;
  std::vector<PlaneVector> targets;
};

const Cloud& cloud(int n) {
  static std::map<int, Cloud> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0, 1);
  Cloud c;
  for (int i = 0; i < n; ++i) {
    PlaneVector p{u(rng), u(rng)};
    c.src.push_back(p, u(rng));
    c.targets.push_back(p);
  }
  return cache.emplace(n, std::move(c)).first->second;
}

void direct(benchmark::State& state, Exec exec) {
  const auto& c = cloud(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel::velocity_direct(c.src.view(), c.targets, kernel::BlobSpec::blob(0.01), exec));
  state.counters["pairs/s"] = benchmark::Counter(
      static_cast<double>(state.range(0)) * state.range(0), benchmark::Counter::kIsIterationInvariantRate);
}

void tree(benchmark::State& state, Exec exec) {
  const auto& c = cloud(static_cast<int>(state.range(0)));
  const kernel::TreecodeParams params{0.5, 64, 6};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernel::velocity_tree(c.src.view(), c.targets, kernel::BlobSpec::blob(0.01), params, exec));
}

void BM_DirectSerial(benchmark::State& s) { direct(s, Exec::Serial); }
void BM_DirectParallel(benchmark::State& s) { direct(s, Exec::Parallel); }
void BM_TreeSerial(benchmark::State& s) { tree(s, Exec::Serial); }
void BM_TreeParallel(benchmark::State& s) { tree(s, Exec::Parallel); }

}  // namespace

BENCHMARK(BM_DirectSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
