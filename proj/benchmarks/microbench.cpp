#include <benchmark/benchmark.h>

#include <random>

#include "pqe/baselines.hpp"
#include "pqe/priority_queue.hpp"
#include "pqe/slot.hpp"

namespace {

void BM_SlotPackUnpack(benchmark::State& state) {
    std::uint64_t acc = 0;
    pqe::SlotWord w{17, 0x01000005};
    for (auto _ : state) {
        const auto packed = pqe::encode_slot(w.value, w.stamp);
        acc += pqe::decode_slot(packed).stamp;
        benchmark::DoNotOptimize(acc);
        ++w.value;
        if (w.value == pqe::kMaxInt) w.value = pqe::kMinKey;
    }
}
BENCHMARK(BM_SlotPackUnpack);

void BM_LockedHeapAddRemove(benchmark::State& state) {
    pqe::LockedHeap heap;
    std::mt19937_64 rng(1);
    for (int i = 0; i < state.range(0); ++i) heap.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
    for (auto _ : state) {
        heap.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
        benchmark::DoNotOptimize(heap.remove_min());
    }
}
BENCHMARK(BM_LockedHeapAddRemove)->Arg(2000)->Arg(100000);

void BM_LockedSkiplistAddRemove(benchmark::State& state) {
    pqe::LockedSkiplist list;
    std::mt19937_64 rng(1);
    for (int i = 0; i < state.range(0); ++i) list.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
    for (auto _ : state) {
        list.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
        benchmark::DoNotOptimize(list.remove_min());
    }
}
BENCHMARK(BM_LockedSkiplistAddRemove)->Arg(2000)->Arg(100000);

// One client against the server thread: every removal is a round trip.
void BM_PqeSingleClientAddRemove(benchmark::State& state) {
    pqe::QueueConfig cfg;
    cfg.max_threads = 1;
    cfg.strategy = state.range(1) == 0 ? pqe::ServerStrategy::eager : pqe::ServerStrategy::lazy;
    pqe::PriorityQueue pq(cfg);
    pq.start();
    {
        auto client = pq.register_thread();
        std::mt19937_64 rng(1);
        for (int i = 0; i < state.range(0); ++i) client.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
        for (auto _ : state) {
            client.add(static_cast<pqe::Key>(rng() % 1000000 + 4));
            benchmark::DoNotOptimize(client.remove_min());
        }
    }
    pq.stop();
}
BENCHMARK(BM_PqeSingleClientAddRemove)->Args({2000, 0})->Args({2000, 1})->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
