#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pqe/baselines.hpp"
#include "pqe/key.hpp"
#include "pqe/lincheck/history.hpp"
#include "pqe/priority_queue.hpp"

namespace pqe::lincheck {

/// Queue under test, driven from `threads` recording threads. begin_thread
/// and end_thread run on the worker thread itself.
class Target {
public:
    virtual ~Target() = default;
    virtual void begin_thread(std::uint32_t /*thread*/) {}
    virtual void end_thread(std::uint32_t /*thread*/) {}
    virtual void add(std::uint32_t thread, Key v) = 0;
    virtual std::optional<Key> remove_min(std::uint32_t thread) = 0;
};

/// Drives a PriorityQueue through one registered client per worker thread.
class QueueTarget final : public Target {
public:
    explicit QueueTarget(PriorityQueue& queue, std::size_t threads) : queue_(queue), clients_(threads) {}

    void begin_thread(std::uint32_t t) override { clients_[t].emplace(queue_.register_thread()); }
    void end_thread(std::uint32_t t) override { clients_[t].reset(); }
    void add(std::uint32_t t, Key v) override { clients_[t]->add(v); }
    std::optional<Key> remove_min(std::uint32_t t) override { return clients_[t]->remove_min(); }

private:
    PriorityQueue& queue_;
    std::vector<std::optional<PriorityQueue::Client>> clients_;
};

class HeapTarget final : public Target {
public:
    void add(std::uint32_t, Key v) override { heap_.add(v); }
    std::optional<Key> remove_min(std::uint32_t) override { return heap_.remove_min(); }

private:
    LockedHeap heap_;
};

struct RecordOptions {
    std::uint32_t threads = 4;
    std::uint32_t ops_per_thread = 50;
    /// Maximum operations recorded; further operations are not issued.
    std::uint32_t window_size = 500;
    double add_probability = 0.5;
    /// Keys are drawn uniformly from [key_lo, key_hi].
    Key key_lo = kMinKey;
    Key key_hi = kMinKey + 31;
    std::uint64_t seed = 1;
};

inline constexpr std::uint32_t kMaxRecordThreads = 8;
inline constexpr std::uint32_t kMaxWindow = 500;

/// Runs the workload concurrently and returns the recorded history. Throws
/// std::invalid_argument when the window exceeds 500 operations or more than
/// 8 threads are requested.
History record_run(Target& target, const RecordOptions& options);

}  // namespace pqe::lincheck
