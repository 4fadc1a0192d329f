#include "pqe/lincheck/recorder.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <stdexcept>
#include <thread>

#include "pqe/backoff.hpp"

namespace pqe::lincheck {

History record_run(Target& target, const RecordOptions& options) {
    if (options.threads == 0 || options.threads > kMaxRecordThreads) {
        throw std::invalid_argument("record_run supports 1..8 threads");
    }
    if (options.window_size == 0 || options.window_size > kMaxWindow) {
        throw std::invalid_argument("record_run window must be in [1, 500]");
    }
    if (options.key_lo < kMinKey || options.key_hi > kMaxKey || options.key_lo > options.key_hi) {
        throw std::invalid_argument("record_run key range is not admissible");
    }

    const std::uint64_t requested = std::uint64_t{options.threads} * options.ops_per_thread;
    std::atomic<std::uint64_t> clock{1};
    std::atomic<std::uint32_t> tickets{0};
    std::atomic<std::uint32_t> ready{0};
    std::vector<std::vector<OpRecord>> logs(options.threads);

    auto worker = [&](std::uint32_t t) {
        target.begin_thread(t);
        std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + t);
        std::uniform_int_distribution<Key> keys(options.key_lo, options.key_hi);
        std::bernoulli_distribution coin(options.add_probability);
        auto& log = logs[t];
        log.reserve(options.ops_per_thread);

        ready.fetch_add(1);
        Backoff wait;
        while (ready.load() < options.threads) wait.pause();

        for (std::uint32_t i = 0; i < options.ops_per_thread; ++i) {
            if (tickets.fetch_add(1) >= options.window_size) break;
            OpRecord r;
            r.thread = t;
            if (coin(rng)) {
                r.op = OpKind::add;
                r.arg = keys(rng);
                r.invoke = clock.fetch_add(1);
                target.add(t, r.arg);
                r.response = clock.fetch_add(1);
            } else {
                r.op = OpKind::remove_min;
                r.invoke = clock.fetch_add(1);
                r.result = target.remove_min(t);
                r.response = clock.fetch_add(1);
            }
            log.push_back(r);
        }
        target.end_thread(t);
    };

    std::vector<std::thread> threads;
    threads.reserve(options.threads);
    for (std::uint32_t t = 0; t < options.threads; ++t) threads.emplace_back(worker, t);
    for (auto& th : threads) th.join();

    History h;
    h.truncated = requested > options.window_size;
    for (auto& log : logs) h.records.insert(h.records.end(), log.begin(), log.end());
    std::sort(h.records.begin(), h.records.end(),
              [](const OpRecord& a, const OpRecord& b) { return a.invoke < b.invoke; });
    return h;
}

}  // namespace pqe::lincheck
