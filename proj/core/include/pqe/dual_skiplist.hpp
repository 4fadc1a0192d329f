#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pqe/adaptive_policy.hpp"
#include "pqe/bucket.hpp"
#include "pqe/epoch.hpp"
#include "pqe/key.hpp"
#include "pqe/swmr_lock.hpp"

namespace pqe {

/// Per-level predecessors and successors of a search key, plus the bucket
/// holding the key at level 0 if there is one.
struct FindResult {
    std::array<Bucket*, kLevelCount> preds{};
    std::array<Bucket*, kLevelCount> succs{};
    Bucket* found = nullptr;
};

/// (key, multiplicity) pair used by the inspection helpers.
using KeyCount = std::pair<Key, std::uint32_t>;

/// Skiplist split into a sequential part, owned by the server thread, and a
/// parallel part that accepts concurrent insertions.
///
/// Both parts hang off their own head sentinel and end in the shared tail.
/// `last_seq` divides the key space: every key in the sequential part is no
/// larger than every key in the parallel part. The server consumes the
/// sequential part front to back, and when it runs dry detaches a fresh batch
/// from the front of the parallel part (move_head). If removals stop arriving
/// the server splices the remnant back (chop_head) so that small insertions
/// can proceed in parallel again.
///
/// add_par may be called from any number of registered client threads. Every
/// other mutator is reserved to the single server thread.
class DualSkiplist {
public:
    explicit DualSkiplist(std::size_t max_clients = 256, AdaptiveParams params = {},
                          std::uint64_t seed = 0x5eed);
    ~DualSkiplist();

    DualSkiplist(const DualSkiplist&) = delete;
    DualSkiplist& operator=(const DualSkiplist&) = delete;

    /// Plain skiplist search starting at `head`. Never mutates.
    FindResult find(const Bucket* head, Key v) const;

    /// Search of the parallel part validated by the lock timestamp. On
    /// success the caller holds the lock shared and `out` describes a state no
    /// head-moving operation has touched since the search started. On failure
    /// the lock is not held and `out` must be discarded.
    ///
    /// `before_acquire` runs between the search and the lock acquisition; it
    /// exists so tests can force an intervening writer.
    template <typename Hook>
    bool clean_find(Key v, FindResult& out, Hook&& before_acquire) {
        const std::uint32_t stamp = lock_.timestamp();
        out = find(head_par_, v);
        before_acquire();
        lock_.lock_shared();
        if (lock_.timestamp() != stamp) {
            lock_.unlock_shared();
            return false;
        }
        return true;
    }
    bool clean_find(Key v, FindResult& out) {
        return clean_find(v, out, [] {});
    }

    /// Concurrent insertion into the parallel part on behalf of client
    /// `client`. Returns false, leaving the structure untouched, when `v` falls
    /// in the sequential domain (v <= last_seq key).
    bool add_par(Key v, std::size_t client, LevelGenerator& levels);

    /// Server: insert into the sequential part. Falls back to parallel
    /// placement if `v` no longer belongs to the sequential domain.
    void add_seq(Key v);
    /// Server: remove and return the minimum, or kMaxInt when empty.
    Key remove_seq();
    /// Server: detach a new sequential part. False if the parallel part was empty.
    bool move_head();
    /// Server: splice the live sequential remnant back into the parallel part.
    bool chop_head();
    /// Server: place a delegated insertion wherever it belongs now.
    void server_add(Key v);

    [[nodiscard]] Key min_value() const noexcept { return min_value_.load(std::memory_order_acquire); }
    /// Key of the divisor bucket; 0 (the head sentinel key) when there is no
    /// sequential part.
    [[nodiscard]] Key last_seq_key() const noexcept {
        return last_seq_key_.load(std::memory_order_acquire);
    }
    [[nodiscard]] bool has_seq_part() const noexcept { return curr_seq_ != nullptr; }
    [[nodiscard]] Key curr_seq_key() const noexcept {
        return curr_seq_ != nullptr ? curr_seq_->key() : kMaxInt;
    }

    /// Server: lowers the cached minimum; used by the lazy server ahead of a
    /// deferred add_seq.
    void lower_min(Key v) noexcept;

    [[nodiscard]] const Bucket* head_seq() const noexcept { return head_seq_; }
    [[nodiscard]] const Bucket* head_par() const noexcept { return head_par_; }
    [[nodiscard]] const Bucket* tail() const noexcept { return tail_; }

    [[nodiscard]] SwmrLock& lock() noexcept { return lock_; }
    [[nodiscard]] const AdaptivePolicy& policy() const noexcept { return policy_; }
    [[nodiscard]] std::uint64_t head_moves() const noexcept {
        return head_moves_.load(std::memory_order_relaxed);
    }
    [[nodiscard]] std::uint64_t chop_heads() const noexcept {
        return chop_heads_.load(std::memory_order_relaxed);
    }
    [[nodiscard]] std::uint64_t insertions_since_move() const noexcept { return insertions_since_move_; }
    [[nodiscard]] EpochReclaimer& reclaimer() noexcept { return reclaimer_; }

    /// Restricts server-only operations to the calling thread (checked in
    /// debug builds). Unbound means any thread may act as the server.
    void bind_server_thread() noexcept { owner_ = std::this_thread::get_id(); }
    void unbind_server_thread() noexcept { owner_ = std::thread::id{}; }

    // Quiescent inspection. Not safe against concurrent mutation.

    /// Live sequential buckets from currSeq to lastSeq (positive counts only).
    [[nodiscard]] std::vector<KeyCount> seq_contents() const;
    /// Parallel buckets at level 0.
    [[nodiscard]] std::vector<KeyCount> par_contents() const;
    /// Sorted multiset of all live keys.
    [[nodiscard]] std::vector<Key> live_keys() const;
    /// Validates ordering, level linkage and the minimum bound. Returns an
    /// empty string when everything holds, otherwise a description.
    [[nodiscard]] std::string check_invariants() const;

private:
    void link_parallel_unlocked(Key v);
    std::vector<Bucket*> collect_seq_until(const Bucket* stop) const;
    std::vector<Bucket*> unlink_dead_after_curr();
    void reset_seq_head() noexcept;
    void assert_server() const noexcept;

    Bucket* head_seq_;
    Bucket* head_par_;
    Bucket* tail_;

    // Server-owned cursors; clients only read last_seq_key_.
    Bucket* curr_seq_ = nullptr;
    Bucket* last_seq_;
    std::atomic<Key> last_seq_key_{0};
    std::atomic<Key> min_value_{kMaxInt};

    SwmrLock lock_;
    AdaptivePolicy policy_;
    bool first_move_ = true;
    std::uint64_t insertions_since_move_ = 0;
    LevelGenerator server_levels_;
    EpochReclaimer reclaimer_;

    std::atomic<std::uint64_t> head_moves_{0};
    std::atomic<std::uint64_t> chop_heads_{0};
    std::thread::id owner_{};
};

}  // namespace pqe
