#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "pqe/dual_skiplist.hpp"
#include "pqe/key.hpp"
#include "pqe/slot.hpp"

namespace pqe {

/// One logged slot change.
struct SlotTransition {
    std::uint32_t slot;
    SlotWord from;
    SlotWord to;
};

/// One elimination decision: the exchanged value and the minimum observed
/// right before the CAS that completed the exchange.
struct EliminationRecord {
    Key value;
    Key observed_min;
};

/// Append-only audit trail owned by a single thread.
struct AuditLog {
    std::vector<SlotTransition> transitions;
    std::vector<EliminationRecord> eliminations;

    void clear() {
        transitions.clear();
        eliminations.clear();
    }
};

/// Which path completed an operation, counted by the thread that did the
/// work. An elimination bumps one add and one remove counter at once.
struct OpCounters {
    std::uint64_t add_par = 0;
    std::uint64_t add_elim = 0;
    std::uint64_t add_srv = 0;
    std::uint64_t rem_elim = 0;
    std::uint64_t rem_srv = 0;

    [[nodiscard]] std::uint64_t adds() const noexcept { return add_par + add_elim + add_srv; }
    [[nodiscard]] std::uint64_t removes() const noexcept { return rem_elim + rem_srv; }

    OpCounters& operator+=(const OpCounters& o) noexcept {
        add_par += o.add_par;
        add_elim += o.add_elim;
        add_srv += o.add_srv;
        rem_elim += o.rem_elim;
        rem_srv += o.rem_srv;
        return *this;
    }
    friend OpCounters operator-(OpCounters a, const OpCounters& b) noexcept {
        a.add_par -= b.add_par;
        a.add_elim -= b.add_elim;
        a.add_srv -= b.add_srv;
        a.rem_elim -= b.rem_elim;
        a.rem_srv -= b.rem_srv;
        return a;
    }
};

/// Fixed array of 64-bit slots, one per cache line.
class EliminationArray {
public:
    explicit EliminationArray(std::size_t size);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    [[nodiscard]] SlotWord load(std::size_t i) const noexcept {
        return SlotWord::unpack(slots_[i].word.load(std::memory_order_acquire));
    }

    bool cas(std::size_t i, SlotWord expected, SlotWord desired, AuditLog* audit) noexcept {
        std::uint64_t e = expected.pack();
        if (!slots_[i].word.compare_exchange_strong(e, desired.pack(), std::memory_order_acq_rel,
                                                    std::memory_order_acquire)) {
            return false;
        }
        if (audit != nullptr) audit->transitions.push_back({static_cast<std::uint32_t>(i), expected, desired});
        return true;
    }

    /// Plain store for transitions only one party can make (reset by the
    /// poster, reply by the server). `from` is the word being replaced.
    void store(std::size_t i, SlotWord from, SlotWord to, AuditLog* audit) noexcept {
        slots_[i].word.store(to.pack(), std::memory_order_release);
        if (audit != nullptr) audit->transitions.push_back({static_cast<std::uint32_t>(i), from, to});
    }

    /// True when every slot is EMPTY.
    [[nodiscard]] bool at_rest() const noexcept;

private:
    struct alignas(64) Slot {
        std::atomic<std::uint64_t> word{0};
    };
    std::size_t size_;
    std::unique_ptr<Slot[]> slots_;
};

struct EliminationParams {
    std::uint32_t max_elim = 4;
    std::uint32_t max_elim_min = 32;
};

/// Per-thread state of a registered client.
struct ClientContext {
    explicit ClientContext(std::uint32_t thread_id, std::uint64_t seed)
        : id(thread_id), stamps(thread_id), levels(seed ^ (0x9E3779B97F4A7C15ULL * (thread_id + 1))) {}

    std::uint32_t id;
    StampSource stamps;
    LevelGenerator levels;
    OpCounters counters;
    AuditLog* audit = nullptr;
};

/// Client side of removeMin: eliminate against an eligible posted add, or
/// post a removal request and wait for a reply. Returns kMaxInt when the
/// queue was empty at the linearization point.
Key eliminating_remove_min(ClientContext& ctx, EliminationArray& elim, DualSkiplist& skiplist);

/// Client side of add: parallel insertion when the value is large, otherwise
/// elimination against a waiting removal, falling back to posting the value
/// for the server.
void eliminating_add(Key v, ClientContext& ctx, EliminationArray& elim, DualSkiplist& skiplist,
                     const EliminationParams& params);

}  // namespace pqe
