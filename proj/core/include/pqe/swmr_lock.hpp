#pragma once

#include <atomic>
#include <cstdint>

#include "pqe/backoff.hpp"

namespace pqe {

/// Single-writer/multi-reader lock with writer preference and a timestamp.
///
/// The whole state lives in one 64-bit word:
///   bits 32..63  timestamp; odd while a writer is inside its critical section
///   bit  31      writer pending; new readers stall while it is set
///   bits 0..30   reader count
///
/// The timestamp advances on every writer acquire and every writer release,
/// so two equal timestamp reads bracket an interval in which no writer
/// section began or completed. Member names follow the standard
/// Lockable/SharedLockable requirements so std::unique_lock and
/// std::shared_lock work directly.
class SwmrLock {
public:
    SwmrLock() = default;
    SwmrLock(const SwmrLock&) = delete;
    SwmrLock& operator=(const SwmrLock&) = delete;

    void lock_shared() noexcept {
        Backoff backoff;
        std::uint64_t w = word_.load(std::memory_order_relaxed);
        for (;;) {
            if ((w & (kWriterActive | kPending)) == 0) {
                if (word_.compare_exchange_weak(w, w + kReaderOne, std::memory_order_acquire,
                                                std::memory_order_relaxed)) {
                    return;
                }
                continue;
            }
            backoff.pause();
            w = word_.load(std::memory_order_relaxed);
        }
    }

    void unlock_shared() noexcept { word_.fetch_sub(kReaderOne, std::memory_order_release); }

    void lock() noexcept {
        Backoff backoff;
        std::uint64_t w = word_.load(std::memory_order_relaxed);
        for (;;) {
            if ((w & (kWriterActive | kPending)) == 0) {
                if (word_.compare_exchange_weak(w, w | kPending, std::memory_order_acquire,
                                                std::memory_order_relaxed)) {
                    break;
                }
                continue;
            }
            backoff.pause();
            w = word_.load(std::memory_order_relaxed);
        }
        backoff.reset();
        while ((word_.load(std::memory_order_acquire) & kReaderMask) != 0) backoff.pause();
        // Readers cannot enter while pending is set, so this is the only writer
        // of the word: clear pending and make the timestamp odd in one step.
        word_.fetch_add(kTimestampOne - kPending, std::memory_order_acq_rel);
    }

    void unlock() noexcept { word_.fetch_add(kTimestampOne, std::memory_order_release); }

    [[nodiscard]] std::uint32_t timestamp() const noexcept {
        return static_cast<std::uint32_t>(word_.load(std::memory_order_acquire) >> 32);
    }

    [[nodiscard]] std::uint32_t readers() const noexcept {
        return static_cast<std::uint32_t>(word_.load(std::memory_order_acquire) & kReaderMask);
    }

    [[nodiscard]] bool writer_active() const noexcept {
        return (word_.load(std::memory_order_acquire) & kWriterActive) != 0;
    }

private:
    static constexpr std::uint64_t kReaderOne = 1;
    static constexpr std::uint64_t kReaderMask = (std::uint64_t{1} << 31) - 1;
    static constexpr std::uint64_t kPending = std::uint64_t{1} << 31;
    static constexpr std::uint64_t kTimestampOne = std::uint64_t{1} << 32;
    static constexpr std::uint64_t kWriterActive = kTimestampOne;  // low timestamp bit

    std::atomic<std::uint64_t> word_{0};
};

}  // namespace pqe
