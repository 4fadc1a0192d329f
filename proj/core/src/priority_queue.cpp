#include "pqe/priority_queue.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace pqe {

void QueueConfig::validate() const {
    if (max_threads == 0 || max_threads > kMaxClientThreads) {
        throw std::invalid_argument("max_threads must be in [1, 256], got " + std::to_string(max_threads));
    }
    if (effective_elim_size() == 0) throw std::invalid_argument("elimination array must be non-empty");
    if (max_elim == 0 || max_elim_min == 0) throw std::invalid_argument("elimination rounds must be positive");
    if (chop_idle_scans == 0) throw std::invalid_argument("chop_idle_scans must be positive");
    if (adaptive.min_batch == 0 || adaptive.min_batch > adaptive.max_batch ||
        adaptive.initial_batch < adaptive.min_batch || adaptive.initial_batch > adaptive.max_batch) {
        throw std::invalid_argument("inconsistent adaptive batch bounds");
    }
}

namespace {
const QueueConfig& validated(const QueueConfig& c) {
    c.validate();
    return c;
}
}  // namespace

PriorityQueue::PriorityQueue(QueueConfig config)
    : config_(validated(config)),
      skiplist_(config_.max_threads, config_.adaptive, config_.seed),
      elim_(config_.effective_elim_size()),
      elim_params_{config_.max_elim, config_.max_elim_min},
      server_(skiplist_, elim_, ServerConfig{config_.strategy, config_.chop_idle_scans}),
      contexts_(config_.max_threads),
      in_use_(config_.max_threads, false),
      client_audit_(config_.max_threads) {
    if (config_.audit) server_.set_audit(&server_audit_);
}

PriorityQueue::~PriorityQueue() {
    if (server_.running()) server_.stop();
}

void PriorityQueue::start() { server_.start(); }
void PriorityQueue::stop() { server_.stop(); }

PriorityQueue::Client PriorityQueue::register_thread() {
    std::lock_guard guard(registry_mutex_);
    for (std::uint32_t id = 0; id < in_use_.size(); ++id) {
        if (in_use_[id]) continue;
        in_use_[id] = true;
        // Contexts persist across re-registration so stamps stay unique.
        if (!contexts_[id]) {
            contexts_[id] = std::make_unique<ClientContext>(id, config_.seed);
            if (config_.audit) {
                client_audit_[id] = std::make_unique<AuditLog>();
                contexts_[id]->audit = client_audit_[id].get();
            }
        }
        return Client(this, contexts_[id].get());
    }
    throw std::runtime_error("client capacity exhausted (" + std::to_string(in_use_.size()) + " threads)");
}

void PriorityQueue::release(std::uint32_t id) noexcept {
    std::lock_guard guard(registry_mutex_);
    in_use_[id] = false;
}

QueueStats PriorityQueue::stats() const {
    QueueStats s;
    {
        std::lock_guard guard(registry_mutex_);
        for (const auto& ctx : contexts_) {
            if (ctx) s.ops += ctx->counters;
        }
    }
    s.ops += server_.counters();
    s.head_moves = skiplist_.head_moves();
    s.chop_heads = skiplist_.chop_heads();
    return s;
}

AuditTrail PriorityQueue::audit_trail() const {
    AuditTrail trail;
    auto append = [&trail](const AuditLog& log) {
        trail.transitions.insert(trail.transitions.end(), log.transitions.begin(), log.transitions.end());
        trail.eliminations.insert(trail.eliminations.end(), log.eliminations.begin(), log.eliminations.end());
    };
    std::lock_guard guard(registry_mutex_);
    for (const auto& log : client_audit_) {
        if (log) append(*log);
    }
    append(server_audit_);
    return trail;
}

PriorityQueue::Client::Client(Client&& other) noexcept
    : queue_(std::exchange(other.queue_, nullptr)), ctx_(other.ctx_) {}

PriorityQueue::Client& PriorityQueue::Client::operator=(Client&& other) noexcept {
    if (this != &other) {
        unregister();
        queue_ = std::exchange(other.queue_, nullptr);
        ctx_ = other.ctx_;
    }
    return *this;
}

PriorityQueue::Client::~Client() { unregister(); }

void PriorityQueue::Client::unregister() noexcept {
    if (queue_ != nullptr) {
        queue_->release(ctx_->id);
        queue_ = nullptr;
    }
}

void PriorityQueue::Client::add(Key v) {
    if (!is_admissible(v)) throw std::invalid_argument("key " + std::to_string(v) + " is reserved");
    if (queue_ == nullptr) throw std::logic_error("client is not registered");
    eliminating_add(v, *ctx_, queue_->elim_, queue_->skiplist_, queue_->elim_params_);
}

std::optional<Key> PriorityQueue::Client::remove_min() {
    if (queue_ == nullptr) throw std::logic_error("client is not registered");
    return to_result(eliminating_remove_min(*ctx_, queue_->elim_, queue_->skiplist_));
}

}  // namespace pqe
