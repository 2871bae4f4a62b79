// Serial reference scan against the OpenMP scan, both backends.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "support/params.hpp"
#include "support/world.hpp"

using namespace tlsaa;

namespace {

// Built once per (backend, size); publishing curve records dominates otherwise.
testing::World& world(bool curve, std::size_t n) {
  static std::map<std::pair<bool, std::size_t>, std::unique_ptr<testing::World>> cache;
  auto& slot = cache[{curve, n}];
  if (!slot) {
    auto ctx = curve ? PairingContext::curve() : PairingContext::oracle(testing::kPropertyQ);
    slot = std::make_unique<testing::World>(std::move(ctx), 2, "bench", std::vector<std::string>{"A1", "A2"});
    for (std::size_t i = 0; i < n; ++i)
      slot->publish("record", {i % 4 == 0 ? "bp" : "other"}, {"A1", "A2"}, static_cast<std::uint32_t>(1 + i % 2));
  }
  return *slot;
}

void BM_SearchSerial(benchmark::State& state) {
  auto& w = world(state.range(0) != 0, static_cast<std::size_t>(state.range(1)));
  const auto req = w.search_request("bp", Subset{1, 2});
  for (auto _ : state) benchmark::DoNotOptimize(w.server->search_serial(req));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_SearchParallel(benchmark::State& state) {
  auto& w = world(state.range(0) != 0, static_cast<std::size_t>(state.range(1)));
  const auto req = w.search_request("bp", Subset{1, 2});
  const auto workers = static_cast<std::size_t>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(w.server->search(req, workers));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

}  // namespace

// Args: curve?, records[, workers]
BENCHMARK(BM_SearchSerial)->ArgsProduct({{0}, {1000, 4000, 16000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->ArgsProduct({{0}, {1000, 4000, 16000}, {2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchSerial)->ArgsProduct({{1}, {64, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->ArgsProduct({{1}, {64, 256}, {2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
