#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "pqe/bucket.hpp"

namespace pqe {

/// Deferred reclamation for buckets dropped from a consumed sequential part.
///
/// Clients announce the global epoch before traversing the parallel part and
/// clear the announcement when done. The server retires a batch with the
/// current epoch as its tag and then advances the epoch; a batch is freed once
/// every active announcement is newer than its tag. Only the server retires
/// and reclaims.
class EpochReclaimer {
public:
    explicit EpochReclaimer(std::size_t participants);
    ~EpochReclaimer();

    EpochReclaimer(const EpochReclaimer&) = delete;
    EpochReclaimer& operator=(const EpochReclaimer&) = delete;

    void enter(std::size_t participant) noexcept;
    void exit(std::size_t participant) noexcept;

    void retire(std::vector<Bucket*> batch);
    /// Frees every batch no active participant can still reference.
    std::size_t reclaim();

    [[nodiscard]] std::size_t pending_batches() const noexcept { return retired_.size(); }
    [[nodiscard]] std::size_t participants() const noexcept { return slot_count_; }

private:
    struct alignas(64) Announcement {
        std::atomic<std::uint64_t> epoch{0};  // 0 = inactive
    };
    struct Batch {
        std::uint64_t tag;
        std::vector<Bucket*> buckets;
    };

    std::size_t slot_count_;
    std::unique_ptr<Announcement[]> slots_;
    std::atomic<std::uint64_t> global_{1};
    std::vector<Batch> retired_;
};

class EpochGuard {
public:
    EpochGuard(EpochReclaimer& r, std::size_t participant) noexcept : r_(r), id_(participant) {
        r_.enter(id_);
    }
    ~EpochGuard() { r_.exit(id_); }
    EpochGuard(const EpochGuard&) = delete;
    EpochGuard& operator=(const EpochGuard&) = delete;

private:
    EpochReclaimer& r_;
    std::size_t id_;
};

}  // namespace pqe
