#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <new>

#include "pqe/key.hpp"

namespace pqe {

inline constexpr int kMaxLevel = 20;
inline constexpr int kLevelCount = kMaxLevel + 1;

/// Skiplist node for one key. Duplicates share a bucket through `counter`.
/// The successor array is allocated inline after the header and sized to
/// `top_level + 1`.
class alignas(alignof(void*)) Bucket {
public:
    Bucket(const Bucket&) = delete;
    Bucket& operator=(const Bucket&) = delete;

    static Bucket* create(Key key, int top_level, std::uint32_t counter) {
        void* raw = ::operator new(allocation_size(top_level));
        auto* b = new (raw) Bucket(key, top_level, counter);
        for (int i = 0; i <= top_level; ++i) new (&b->links()[i]) std::atomic<Bucket*>(nullptr);
        return b;
    }

    static void destroy(Bucket* b) noexcept {
        if (b == nullptr) return;
        for (int i = 0; i <= b->top_level_; ++i) b->links()[i].~atomic();
        b->~Bucket();
        ::operator delete(static_cast<void*>(b));
    }

    [[nodiscard]] Key key() const noexcept { return key_; }
    [[nodiscard]] int top_level() const noexcept { return top_level_; }

    std::atomic<std::uint32_t>& counter() noexcept { return counter_; }
    const std::atomic<std::uint32_t>& counter() const noexcept { return counter_; }

    std::atomic<Bucket*>& next(int level) noexcept { return links()[level]; }
    const std::atomic<Bucket*>& next(int level) const noexcept { return links()[level]; }

    Bucket* load_next(int level) const noexcept {
        return links()[level].load(std::memory_order_acquire);
    }

private:
    Bucket(Key key, int top_level, std::uint32_t counter) noexcept
        : key_(key), top_level_(top_level), counter_(counter) {}
    ~Bucket() = default;

    static std::size_t allocation_size(int top_level) noexcept {
        return sizeof(Bucket) + static_cast<std::size_t>(top_level + 1) * sizeof(std::atomic<Bucket*>);
    }

    std::atomic<Bucket*>* links() noexcept {
        return reinterpret_cast<std::atomic<Bucket*>*>(this + 1);
    }
    const std::atomic<Bucket*>* links() const noexcept {
        return reinterpret_cast<const std::atomic<Bucket*>*>(this + 1);
    }

    Key key_;
    int top_level_;
    std::atomic<std::uint32_t> counter_;
};

static_assert(sizeof(Bucket) % alignof(std::atomic<Bucket*>) == 0);

/// Geometric level generator (ratio 1/2) capped at kMaxLevel. Each client
/// thread owns one; it is not thread-safe.
class LevelGenerator {
public:
    explicit LevelGenerator(std::uint64_t seed) noexcept : state_(seed | 1) {}

    int next() noexcept {
        // xorshift64*
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        const std::uint64_t r = state_ * 0x2545F4914F6CDD1DULL;
        int level = 0;
        std::uint64_t bits = r >> 32;
        while ((bits & 1u) != 0 && level < kMaxLevel) {
            ++level;
            bits >>= 1;
        }
        return level;
    }

private:
    std::uint64_t state_;
};

}  // namespace pqe
