#include "pqe/server.hpp"

#include <cassert>
#include <stdexcept>

#include "pqe/backoff.hpp"

namespace pqe {

Server::Server(DualSkiplist& skiplist, EliminationArray& elim, ServerConfig config)
    : skiplist_(skiplist), elim_(elim), config_(config) {}

Server::~Server() {
    if (running()) stop();
}

OpCounters Server::counters() const noexcept {
    OpCounters c;
    c.add_srv = add_srv_.load(std::memory_order_relaxed);
    c.rem_srv = rem_srv_.load(std::memory_order_relaxed);
    return c;
}

void Server::serve_remove(std::size_t i, SlotWord seen, ScanStats& stats) {
    if (config_.strategy == ServerStrategy::lazy) {
        if (!skiplist_.has_seq_part()) skiplist_.move_head();
        if (skiplist_.has_seq_part()) {
            // The cached minimum is exact while a sequential part exists; the
            // removal itself runs after the client has been released.
            const Key min = skiplist_.min_value();
            if (elim_.cas(i, seen, SlotWord{min, 0}, audit_)) {
                [[maybe_unused]] const Key removed = skiplist_.remove_seq();
                assert(removed == min);
                rem_srv_.store(rem_srv_.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
                ++stats.removes_served;
            }
            return;
        }
    }
    const SlotWord marked{opcode::kInProg, 0};
    if (!elim_.cas(i, seen, marked, audit_)) return;
    const Key min = skiplist_.remove_seq();
    elim_.store(i, marked, SlotWord{min, 0}, audit_);
    rem_srv_.store(rem_srv_.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
    ++stats.removes_served;
}

void Server::serve_add(std::size_t i, SlotWord seen, ScanStats& stats) {
    const SlotWord marked{opcode::kInProg, 0};
    if (!elim_.cas(i, seen, marked, audit_)) return;
    if (config_.strategy == ServerStrategy::lazy && skiplist_.has_seq_part()) {
        // A smaller value must be visible as the minimum before the adder
        // returns; the insertion itself can follow.
        if (seen.value < skiplist_.min_value()) skiplist_.lower_min(seen.value);
        elim_.store(i, marked, SlotWord{opcode::kTaken, 0}, audit_);
        skiplist_.server_add(seen.value);
    } else {
        skiplist_.server_add(seen.value);
        elim_.store(i, marked, SlotWord{opcode::kTaken, 0}, audit_);
    }
    add_srv_.store(add_srv_.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
    ++stats.adds_served;
}

ScanStats Server::serve_once() {
    ScanStats stats;
    for (std::size_t i = 0; i < elim_.size(); ++i) {
        const SlotWord seen = elim_.load(i);
        if (seen.is_remove_request()) {
            ++stats.remove_requests_seen;
            serve_remove(i, seen, stats);
        } else if (seen.is_add_request()) {
            serve_add(i, seen, stats);
        }
    }
    if (stats.remove_requests_seen > 0) {
        idle_scans_ = 0;
    } else if (++idle_scans_ >= config_.chop_idle_scans) {
        idle_scans_ = 0;
        stats.chopped = skiplist_.chop_head();
    }
    return stats;
}

void Server::run() {
    skiplist_.bind_server_thread();
    Backoff backoff;
    while (!stop_requested_.load(std::memory_order_acquire)) {
        if (serve_once().idle()) {
            backoff.pause();
        } else {
            backoff.reset();
        }
    }
    serve_once();
    skiplist_.unbind_server_thread();
}

void Server::start() {
    if (running()) throw std::logic_error("server already running");
    stop_requested_.store(false, std::memory_order_release);
    thread_ = std::thread([this] { run(); });
}

void Server::stop() {
    if (!running()) throw std::logic_error("server not running");
    stop_requested_.store(true, std::memory_order_release);
    thread_.join();
}

}  // namespace pqe
