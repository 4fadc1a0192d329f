#include "pqe/baselines.hpp"

#include <utility>

namespace pqe {

void LockedHeap::add(Key v) {
    std::lock_guard guard(mutex_);
    heap_.push_back(v);
    sift_up(heap_.size() - 1);
}

std::optional<Key> LockedHeap::remove_min() {
    std::lock_guard guard(mutex_);
    if (heap_.empty()) return std::nullopt;
    const Key top = heap_.front();
    heap_.front() = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) sift_down(0);
    return top;
}

std::size_t LockedHeap::size() const {
    std::lock_guard guard(mutex_);
    return heap_.size();
}

bool LockedHeap::is_heap() const {
    std::lock_guard guard(mutex_);
    for (std::size_t i = 1; i < heap_.size(); ++i) {
        if (heap_[(i - 1) / 2] > heap_[i]) return false;
    }
    return true;
}

void LockedHeap::sift_up(std::size_t i) {
    while (i > 0) {
        const std::size_t parent = (i - 1) / 2;
        if (heap_[parent] <= heap_[i]) break;
        std::swap(heap_[parent], heap_[i]);
        i = parent;
    }
}

void LockedHeap::sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    for (;;) {
        const std::size_t l = 2 * i + 1;
        const std::size_t r = l + 1;
        std::size_t smallest = i;
        if (l < n && heap_[l] < heap_[smallest]) smallest = l;
        if (r < n && heap_[r] < heap_[smallest]) smallest = r;
        if (smallest == i) return;
        std::swap(heap_[i], heap_[smallest]);
        i = smallest;
    }
}

LockedSkiplist::LockedSkiplist(std::uint64_t seed) : rng_(seed) {
    head_.top = kLevels - 1;
}

LockedSkiplist::~LockedSkiplist() {
    Node* n = head_.next[0];
    while (n != nullptr) {
        Node* next = n->next[0];
        delete n;
        n = next;
    }
}

int LockedSkiplist::random_level() {
    std::uint64_t bits = rng_();
    int level = 0;
    while ((bits & 1u) != 0 && level < kLevels - 1) {
        ++level;
        bits >>= 1;
    }
    return level;
}

void LockedSkiplist::add(Key v) {
    std::lock_guard guard(mutex_);
    Node* preds[kLevels];
    Node* pred = &head_;
    for (int level = kLevels - 1; level >= 0; --level) {
        while (pred->next[level] != nullptr && pred->next[level]->key < v) pred = pred->next[level];
        preds[level] = pred;
    }
    ++size_;
    Node* hit = preds[0]->next[0];
    if (hit != nullptr && hit->key == v) {
        ++hit->count;
        return;
    }
    auto* node = new Node{v, 1, random_level(), {}};
    for (int level = 0; level <= node->top; ++level) {
        node->next[level] = preds[level]->next[level];
        preds[level]->next[level] = node;
    }
}

std::optional<Key> LockedSkiplist::remove_min() {
    std::lock_guard guard(mutex_);
    Node* first = head_.next[0];
    if (first == nullptr) return std::nullopt;
    --size_;
    const Key key = first->key;
    if (--first->count == 0) {
        for (int level = 0; level <= first->top; ++level) head_.next[level] = first->next[level];
        delete first;
    }
    return key;
}

std::size_t LockedSkiplist::size() const {
    std::lock_guard guard(mutex_);
    return size_;
}

}  // namespace pqe
