// Serial reference vs OpenMP drivers for the two data-parallel kernels.
#include "helpdesk/dataset.hpp"
#include "helpdesk/evaluation.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace helpdesk;

const Dataset& corpus(std::size_t agents) {
    static std::map<std::size_t, Dataset> cache;
    auto it = cache.find(agents);
    if (it == cache.end()) {
        it = cache.emplace(agents, generate({agents, 300, 42, 0.05, 0.5})).first;
    }
    return it->second;
}

void BM_CrossTestSerial(benchmark::State& state) {
    const auto parts = partition_by_agent(corpus(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cross_test_serial(parts, {}, Metric::avg_cost, CostModel{}));
    }
}

void BM_CrossTestParallel(benchmark::State& state) {
    const auto parts = partition_by_agent(corpus(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cross_test(parts, {}, Metric::avg_cost, CostModel{}));
    }
}

void BM_CrossValidateSerial(benchmark::State& state) {
    const auto& d = corpus(5);
    for (auto _ : state) benchmark::DoNotOptimize(cross_validate_serial(d, {}, 10, 7));
}

void BM_CrossValidateParallel(benchmark::State& state) {
    const auto& d = corpus(5);
    for (auto _ : state) benchmark::DoNotOptimize(cross_validate(d, {}, 10, 7));
}

}  // namespace

BENCHMARK(BM_CrossTestSerial)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossTestParallel)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossValidateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossValidateParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
