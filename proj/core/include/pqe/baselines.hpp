#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "pqe/key.hpp"

namespace pqe {

/// Array-backed binary min-heap behind one mutex. Doubles as the sequential
/// reference for every oracle comparison.
class LockedHeap {
public:
    void add(Key v);
    std::optional<Key> remove_min();

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] bool empty() const { return size() == 0; }
    /// Checks the heap property over the whole array.
    [[nodiscard]] bool is_heap() const;

private:
    void sift_up(std::size_t i);
    void sift_down(std::size_t i);

    mutable std::mutex mutex_;
    std::vector<Key> heap_;
};

/// Sequential skiplist of (key, count) buckets behind one mutex.
class LockedSkiplist {
public:
    explicit LockedSkiplist(std::uint64_t seed = 1);
    ~LockedSkiplist();

    LockedSkiplist(const LockedSkiplist&) = delete;
    LockedSkiplist& operator=(const LockedSkiplist&) = delete;

    void add(Key v);
    std::optional<Key> remove_min();
    [[nodiscard]] std::size_t size() const;

private:
    static constexpr int kLevels = 21;
    struct Node {
        Key key;
        std::uint32_t count;
        int top;
        Node* next[kLevels];
    };

    int random_level();

    mutable std::mutex mutex_;
    Node head_{};
    std::size_t size_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace pqe
