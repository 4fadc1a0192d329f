#include "pqe/dual_skiplist.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <set>
#include <sstream>

namespace pqe {

DualSkiplist::DualSkiplist(std::size_t max_clients, AdaptiveParams params, std::uint64_t seed)
    : head_seq_(Bucket::create(0, kMaxLevel, 0)),
      head_par_(Bucket::create(0, kMaxLevel, 0)),
      tail_(Bucket::create(kMaxInt, kMaxLevel, 0)),
      last_seq_(head_par_),
      policy_(params),
      server_levels_(seed),
      reclaimer_(max_clients) {
    for (int i = 0; i < kLevelCount; ++i) {
        head_seq_->next(i).store(tail_, std::memory_order_relaxed);
        head_par_->next(i).store(tail_, std::memory_order_relaxed);
    }
}

DualSkiplist::~DualSkiplist() {
    for (Bucket* head : {head_seq_, head_par_}) {
        Bucket* b = head->load_next(0);
        while (b != tail_) {
            Bucket* next = b->load_next(0);
            Bucket::destroy(b);
            b = next;
        }
    }
    Bucket::destroy(head_seq_);
    Bucket::destroy(head_par_);
    Bucket::destroy(tail_);
}

void DualSkiplist::assert_server() const noexcept {
    assert(owner_ == std::thread::id{} || owner_ == std::this_thread::get_id());
}

FindResult DualSkiplist::find(const Bucket* head, Key v) const {
    FindResult r;
    auto* pred = const_cast<Bucket*>(head);
    for (int level = kMaxLevel; level >= 0; --level) {
        Bucket* curr = pred->load_next(level);
        while (curr->key() < v) {
            pred = curr;
            curr = curr->load_next(level);
        }
        r.preds[level] = pred;
        r.succs[level] = curr;
    }
    Bucket* candidate = r.succs[0];
    r.found = (candidate != tail_ && candidate->key() == v) ? candidate : nullptr;
    return r;
}

void DualSkiplist::lower_min(Key v) noexcept {
    Key m = min_value_.load(std::memory_order_acquire);
    while (m > v && !min_value_.compare_exchange_weak(m, v, std::memory_order_acq_rel,
                                                      std::memory_order_acquire)) {
    }
}

bool DualSkiplist::add_par(Key v, std::size_t client, LevelGenerator& levels) {
    assert(is_admissible(v));
    if (v <= last_seq_key()) return false;

    EpochGuard guard(reclaimer_, client);
    FindResult fr;
    Bucket* mine = nullptr;

    // Level 0: either bump an existing bucket or publish a new one.
    for (;;) {
        if (!clean_find(v, fr)) continue;
        // The divisor only moves under the write lock, so this check is stable
        // for as long as we hold the lock shared.
        if (v <= last_seq_key_.load(std::memory_order_relaxed)) {
            lock_.unlock_shared();
            Bucket::destroy(mine);
            return false;
        }
        if (fr.found != nullptr) {
            fr.found->counter().fetch_add(1, std::memory_order_acq_rel);
            lower_min(v);
            lock_.unlock_shared();
            Bucket::destroy(mine);
            return true;
        }
        if (mine == nullptr) mine = Bucket::create(v, levels.next(), 1);
        for (int i = 0; i <= mine->top_level(); ++i) {
            mine->next(i).store(fr.succs[i], std::memory_order_relaxed);
        }
        Bucket* expected = fr.succs[0];
        if (fr.preds[0]->next(0).compare_exchange_strong(expected, mine, std::memory_order_acq_rel,
                                                         std::memory_order_relaxed)) {
            break;
        }
        lock_.unlock_shared();
    }
    lower_min(v);

    // Upper levels are best effort: if the bucket leaves the parallel part
    // while we retry, it keeps the levels linked so far.
    for (int i = 1; i <= mine->top_level(); ++i) {
        for (;;) {
            mine->next(i).store(fr.succs[i], std::memory_order_release);
            Bucket* expected = fr.succs[i];
            if (fr.preds[i]->next(i).compare_exchange_strong(expected, mine, std::memory_order_acq_rel,
                                                             std::memory_order_relaxed)) {
                break;
            }
            lock_.unlock_shared();
            while (!clean_find(v, fr)) {
            }
            if (fr.found != mine) {
                lock_.unlock_shared();
                return true;
            }
        }
    }
    lock_.unlock_shared();
    return true;
}

void DualSkiplist::link_parallel_unlocked(Key v) {
    // Server-side parallel insertion. No head-moving operation can run
    // concurrently (the server is the only writer), so no lock is needed; the
    // CASes still race with client add_par calls.
    FindResult fr;
    Bucket* mine = nullptr;
    for (;;) {
        fr = find(head_par_, v);
        if (fr.found != nullptr) {
            fr.found->counter().fetch_add(1, std::memory_order_acq_rel);
            lower_min(v);
            Bucket::destroy(mine);
            return;
        }
        if (mine == nullptr) mine = Bucket::create(v, server_levels_.next(), 1);
        for (int i = 0; i <= mine->top_level(); ++i) {
            mine->next(i).store(fr.succs[i], std::memory_order_relaxed);
        }
        Bucket* expected = fr.succs[0];
        if (fr.preds[0]->next(0).compare_exchange_strong(expected, mine, std::memory_order_acq_rel,
                                                         std::memory_order_relaxed)) {
            break;
        }
    }
    lower_min(v);
    for (int i = 1; i <= mine->top_level(); ++i) {
        for (;;) {
            mine->next(i).store(fr.succs[i], std::memory_order_release);
            Bucket* expected = fr.succs[i];
            if (fr.preds[i]->next(i).compare_exchange_strong(expected, mine, std::memory_order_acq_rel,
                                                             std::memory_order_relaxed)) {
                break;
            }
            fr = find(head_par_, v);
        }
    }
}

void DualSkiplist::server_add(Key v) {
    assert_server();
    if (curr_seq_ != nullptr && v <= last_seq_->key()) {
        add_seq(v);
    } else {
        link_parallel_unlocked(v);
    }
}

void DualSkiplist::add_seq(Key v) {
    assert_server();
    if (curr_seq_ == nullptr || v > last_seq_->key()) {
        link_parallel_unlocked(v);
        return;
    }
    ++insertions_since_move_;
    // Publish the new minimum before the bucket becomes reachable.
    lower_min(v);
    FindResult fr = find(head_seq_, v);
    Bucket* b = fr.found;
    if (b != nullptr) {
        b->counter().fetch_add(1, std::memory_order_relaxed);
    } else {
        b = Bucket::create(v, server_levels_.next(), 1);
        for (int i = 0; i <= b->top_level(); ++i) {
            b->next(i).store(fr.succs[i], std::memory_order_relaxed);
        }
        for (int i = 0; i <= b->top_level(); ++i) {
            fr.preds[i]->next(i).store(b, std::memory_order_release);
        }
    }
    if (v < curr_seq_->key()) curr_seq_ = b;
}

Key DualSkiplist::remove_seq() {
    assert_server();
    if (min_value() == kMaxInt) return kMaxInt;
    if (curr_seq_ == nullptr && !move_head()) return kMaxInt;

    const Key key = curr_seq_->key();
    const std::uint32_t left = curr_seq_->counter().load(std::memory_order_relaxed) - 1;
    curr_seq_->counter().store(left, std::memory_order_relaxed);
    if (left == 0) {
        while (curr_seq_ != last_seq_) {
            curr_seq_ = curr_seq_->load_next(0);
            if (curr_seq_->counter().load(std::memory_order_relaxed) > 0) {
                min_value_.store(curr_seq_->key(), std::memory_order_release);
                return key;
            }
        }
        move_head();
    }
    return key;
}

std::vector<Bucket*> DualSkiplist::collect_seq_until(const Bucket* stop) const {
    std::vector<Bucket*> out;
    for (Bucket* b = head_seq_->load_next(0); b != stop && b != tail_; b = b->load_next(0)) {
        out.push_back(b);
    }
    return out;
}

std::vector<Bucket*> DualSkiplist::unlink_dead_after_curr() {
    std::vector<Bucket*> dead;
    for (Bucket* b = curr_seq_; b != last_seq_;) {
        Bucket* next = b->load_next(0);
        if (b != curr_seq_ && b->counter().load(std::memory_order_relaxed) == 0) dead.push_back(b);
        b = next;
    }
    for (Bucket* b : dead) {
        const FindResult fr = find(head_seq_, b->key());
        for (int i = 0; i <= b->top_level(); ++i) {
            if (fr.preds[i]->load_next(i) == b) fr.preds[i]->next(i).store(b->load_next(i), std::memory_order_release);
        }
    }
    return dead;
}

void DualSkiplist::reset_seq_head() noexcept {
    for (int i = 0; i < kLevelCount; ++i) head_seq_->next(i).store(tail_, std::memory_order_release);
}

bool DualSkiplist::move_head() {
    assert_server();
    const std::uint32_t n = first_move_ ? policy_.batch() : policy_.update(insertions_since_move_);
    first_move_ = false;
    insertions_since_move_ = 0;
    head_moves_.fetch_add(1, std::memory_order_relaxed);

    // Whatever is left in the sequential chain is fully consumed.
    reclaimer_.retire(collect_seq_until(tail_));

    std::unique_lock guard(lock_);
    curr_seq_ = nullptr;
    Bucket* pred = head_par_;
    Bucket* curr = head_par_->load_next(0);
    std::uint64_t taken = 0;
    while (taken < n && curr != tail_) {
        taken += curr->counter().load(std::memory_order_acquire);
        if (curr_seq_ == nullptr) {
            curr_seq_ = curr;
            min_value_.store(curr->key(), std::memory_order_release);
        }
        pred = curr;
        curr = curr->load_next(0);
    }

    if (taken == 0) {
        for (int i = 0; i < kLevelCount; ++i) {
            head_par_->next(i).store(tail_, std::memory_order_release);
            head_seq_->next(i).store(tail_, std::memory_order_release);
        }
        last_seq_ = head_par_;
        last_seq_key_.store(0, std::memory_order_release);
        min_value_.store(kMaxInt, std::memory_order_release);
        guard.unlock();
        reclaimer_.reclaim();
        return false;
    }

    last_seq_ = pred;
    last_seq_key_.store(pred->key(), std::memory_order_release);
    for (int i = 0; i < kLevelCount; ++i) {
        head_seq_->next(i).store(head_par_->load_next(i), std::memory_order_release);
    }
    const FindResult fr = find(head_seq_, pred->key() + 1);
    for (int i = 0; i < kLevelCount; ++i) {
        fr.preds[i]->next(i).store(tail_, std::memory_order_release);
        head_par_->next(i).store(fr.succs[i], std::memory_order_release);
    }
    guard.unlock();
    reclaimer_.reclaim();
    return true;
}

bool DualSkiplist::chop_head() {
    assert_server();
    if (curr_seq_ == nullptr) return false;
    chop_heads_.fetch_add(1, std::memory_order_relaxed);

    // Re-inserting below currSeq can revive a consumed bucket and leave dead
    // ones behind it; they must not reach the parallel part.
    std::vector<Bucket*> consumed = unlink_dead_after_curr();
    const FindResult ends = find(head_seq_, last_seq_->key() + 1);
    const FindResult starts = find(head_seq_, curr_seq_->key());
    for (Bucket* b : collect_seq_until(curr_seq_)) consumed.push_back(b);

    {
        std::unique_lock guard(lock_);
        for (int i = 0; i < kLevelCount; ++i) {
            ends.preds[i]->next(i).store(head_par_->load_next(i), std::memory_order_release);
        }
        last_seq_ = head_par_;
        last_seq_key_.store(0, std::memory_order_release);
        curr_seq_ = nullptr;
        // Levels with no live sequential bucket keep their parallel start.
        for (int i = 0; i < kLevelCount; ++i) {
            if (starts.succs[i] != tail_) head_par_->next(i).store(starts.succs[i], std::memory_order_release);
        }
    }
    reset_seq_head();
    reclaimer_.retire(std::move(consumed));
    reclaimer_.reclaim();
    return true;
}

std::vector<KeyCount> DualSkiplist::seq_contents() const {
    std::vector<KeyCount> out;
    if (curr_seq_ == nullptr) return out;
    for (const Bucket* b = curr_seq_;; b = b->load_next(0)) {
        const auto c = b->counter().load(std::memory_order_relaxed);
        if (c > 0) out.emplace_back(b->key(), c);
        if (b == last_seq_) break;
    }
    return out;
}

std::vector<KeyCount> DualSkiplist::par_contents() const {
    std::vector<KeyCount> out;
    for (const Bucket* b = head_par_->load_next(0); b != tail_; b = b->load_next(0)) {
        out.emplace_back(b->key(), b->counter().load(std::memory_order_relaxed));
    }
    return out;
}

std::vector<Key> DualSkiplist::live_keys() const {
    std::vector<Key> out;
    for (const auto& part : {seq_contents(), par_contents()}) {
        for (const auto& [k, c] : part) out.insert(out.end(), c, k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string DualSkiplist::check_invariants() const {
    std::ostringstream err;
    auto check_chain = [&](const Bucket* head, const char* name) {
        std::set<const Bucket*> below;
        for (int level = 0; level < kLevelCount; ++level) {
            std::set<const Bucket*> here;
            Key prev = 0;
            for (const Bucket* b = head->load_next(level); b != tail_; b = b->load_next(level)) {
                if (b->key() <= prev) err << name << ": level " << level << " not increasing at " << b->key() << "; ";
                if (b->top_level() < level) err << name << ": bucket " << b->key() << " above its top level; ";
                if (level > 0 && below.count(b) == 0) {
                    err << name << ": bucket " << b->key() << " linked at " << level << " but not below; ";
                }
                prev = b->key();
                here.insert(b);
            }
            below = std::move(here);
        }
    };
    check_chain(head_seq_, "seq");
    check_chain(head_par_, "par");

    const auto seq = seq_contents();
    const auto par = par_contents();
    for (const auto& [k, c] : par) {
        if (c == 0) err << "par: zero-count bucket " << k << "; ";
    }
    if (!seq.empty() && !par.empty() && seq.back().first > par.front().first) {
        err << "sequential key " << seq.back().first << " exceeds parallel key " << par.front().first << "; ";
    }
    if ((curr_seq_ == nullptr) != (last_seq_ == head_par_)) err << "currSeq/lastSeq disagree; ";
    if (curr_seq_ != nullptr && last_seq_key() != last_seq_->key()) err << "stale lastSeq key; ";

    const auto keys = live_keys();
    const Key m = min_value();
    if (keys.empty() && m != kMaxInt) err << "empty structure with minValue " << m << "; ";
    if (!keys.empty() && m > keys.front()) err << "minValue " << m << " above minimum " << keys.front() << "; ";
    if (!keys.empty() && m == kMaxInt) err << "non-empty structure with minValue MaxInt; ";
    return err.str();
}

}  // namespace pqe
