#include "pqe/epoch.hpp"

#include <algorithm>
#include <limits>

namespace pqe {

EpochReclaimer::EpochReclaimer(std::size_t participants)
    : slot_count_(participants), slots_(std::make_unique<Announcement[]>(participants)) {}

EpochReclaimer::~EpochReclaimer() {
    for (auto& batch : retired_) {
        for (Bucket* b : batch.buckets) Bucket::destroy(b);
    }
}

void EpochReclaimer::enter(std::size_t participant) noexcept {
    auto& slot = slots_[participant].epoch;
    std::uint64_t e = global_.load(std::memory_order_seq_cst);
    for (;;) {
        slot.store(e, std::memory_order_seq_cst);
        const std::uint64_t again = global_.load(std::memory_order_seq_cst);
        if (again == e) return;
        e = again;
    }
}

void EpochReclaimer::exit(std::size_t participant) noexcept {
    slots_[participant].epoch.store(0, std::memory_order_release);
}

void EpochReclaimer::retire(std::vector<Bucket*> batch) {
    if (batch.empty()) return;
    const std::uint64_t tag = global_.load(std::memory_order_seq_cst);
    retired_.push_back(Batch{tag, std::move(batch)});
    global_.fetch_add(1, std::memory_order_seq_cst);
}

std::size_t EpochReclaimer::reclaim() {
    if (retired_.empty()) return 0;
    std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < slot_count_; ++i) {
        const std::uint64_t e = slots_[i].epoch.load(std::memory_order_seq_cst);
        if (e != 0) oldest = std::min(oldest, e);
    }
    std::size_t freed = 0;
    auto keep = std::partition(retired_.begin(), retired_.end(),
                               [oldest](const Batch& b) { return b.tag >= oldest; });
    for (auto it = keep; it != retired_.end(); ++it) {
        for (Bucket* b : it->buckets) Bucket::destroy(b);
        freed += it->buckets.size();
    }
    retired_.erase(keep, retired_.end());
    return freed;
}

}  // namespace pqe
