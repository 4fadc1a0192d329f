#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pqe/adaptive_policy.hpp"
#include "pqe/dual_skiplist.hpp"
#include "pqe/elimination.hpp"
#include "pqe/key.hpp"
#include "pqe/server.hpp"

namespace pqe {

inline constexpr std::size_t kMaxClientThreads = 256;

struct QueueConfig {
    /// Upper bound on simultaneously registered client threads (<= 256).
    std::size_t max_threads = 16;
    /// Elimination array length; 0 selects 2 * max_threads.
    std::size_t elim_size = 0;
    std::uint32_t max_elim = 4;
    std::uint32_t max_elim_min = 32;
    std::uint32_t chop_idle_scans = 16;
    AdaptiveParams adaptive{};
    ServerStrategy strategy = ServerStrategy::eager;
    /// Record every slot transition and elimination decision.
    bool audit = false;
    std::uint64_t seed = 0x5eed;

    [[nodiscard]] std::size_t effective_elim_size() const noexcept {
        return elim_size == 0 ? 2 * max_threads : elim_size;
    }
    /// Throws std::invalid_argument on a bad combination.
    void validate() const;
};

/// Aggregated path counters plus head-moving activity.
struct QueueStats {
    OpCounters ops;
    std::uint64_t head_moves = 0;
    std::uint64_t chop_heads = 0;
};

/// Merged audit trail of all clients and the server.
struct AuditTrail {
    std::vector<SlotTransition> transitions;
    std::vector<EliminationRecord> eliminations;
};

/// Concurrent priority queue over 32-bit keys with multiset semantics.
///
/// Threads register to obtain a Client handle and call add/remove_min on
/// it. A dedicated server thread runs between start() and stop().
///
///     pqe::PriorityQueue pq;
///     pq.start();
///     auto client = pq.register_thread();
///     client.add(42);
///     auto v = client.remove_min();  // 42
///     pq.stop();
class PriorityQueue {
public:
    class Client;

    explicit PriorityQueue(QueueConfig config = {});
    ~PriorityQueue();

    PriorityQueue(const PriorityQueue&) = delete;
    PriorityQueue& operator=(const PriorityQueue&) = delete;

    void start();
    void stop();
    [[nodiscard]] bool running() const noexcept { return server_.running(); }

    /// Assigns the lowest free thread id. Throws std::runtime_error once
    /// max_threads clients are registered.
    Client register_thread();

    /// Sum of all path counters. Exact once the queue is quiescent.
    [[nodiscard]] QueueStats stats() const;
    /// Merged audit trail; only meaningful after stop().
    [[nodiscard]] AuditTrail audit_trail() const;

    [[nodiscard]] const QueueConfig& config() const noexcept { return config_; }
    [[nodiscard]] DualSkiplist& skiplist() noexcept { return skiplist_; }
    [[nodiscard]] const DualSkiplist& skiplist() const noexcept { return skiplist_; }
    [[nodiscard]] EliminationArray& elimination() noexcept { return elim_; }
    [[nodiscard]] Server& server() noexcept { return server_; }

private:
    void release(std::uint32_t id) noexcept;

    QueueConfig config_;
    DualSkiplist skiplist_;
    EliminationArray elim_;
    EliminationParams elim_params_;
    Server server_;

    mutable std::mutex registry_mutex_;
    std::vector<std::unique_ptr<ClientContext>> contexts_;
    std::vector<bool> in_use_;
    std::vector<std::unique_ptr<AuditLog>> client_audit_;
    AuditLog server_audit_;
};

/// Handle for one registered thread. Move-only; unregisters on destruction.
/// A handle must only be used by one thread at a time.
class PriorityQueue::Client {
public:
    Client(Client&& other) noexcept;
    Client& operator=(Client&& other) noexcept;
    ~Client();

    /// Throws std::invalid_argument if `v` is not an admissible key.
    void add(Key v);
    /// Smallest key, or std::nullopt when the queue is empty.
    std::optional<Key> remove_min();

    void unregister() noexcept;
    [[nodiscard]] std::uint32_t id() const noexcept { return ctx_->id; }
    [[nodiscard]] bool registered() const noexcept { return queue_ != nullptr; }

private:
    friend class PriorityQueue;
    Client(PriorityQueue* queue, ClientContext* ctx) noexcept : queue_(queue), ctx_(ctx) {}

    PriorityQueue* queue_;
    ClientContext* ctx_;
};

}  // namespace pqe
