#pragma once

#include <atomic>
#include <cstdint>
#include <thread>

#include "pqe/dual_skiplist.hpp"
#include "pqe/elimination.hpp"

namespace pqe {

enum class ServerStrategy {
    eager,  ///< mark INPROG, run the skiplist operation, then reply
    lazy,   ///< reply from the cached minimum first, run the operation after
};

struct ServerConfig {
    ServerStrategy strategy = ServerStrategy::eager;
    /// Consecutive scans without a removal request before the sequential part
    /// is spliced back into the parallel part.
    std::uint32_t chop_idle_scans = 16;
};

/// What one pass over the elimination array did.
struct ScanStats {
    std::uint32_t removes_served = 0;
    std::uint32_t adds_served = 0;
    std::uint32_t remove_requests_seen = 0;
    bool chopped = false;

    [[nodiscard]] bool idle() const noexcept { return removes_served == 0 && adds_served == 0; }
};

/// The combining thread. It owns every sequential-part operation of the
/// skiplist and answers whatever is left in the elimination array.
class Server {
public:
    Server(DualSkiplist& skiplist, EliminationArray& elim, ServerConfig config = {});
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// One full pass over the array using the configured strategy. May be
    /// called directly (without start) for single-threaded use.
    ScanStats serve_once();

    /// Launches the server thread. Throws std::logic_error if already running.
    void start();
    /// Stops the thread after one final pass that answers every request
    /// posted so far. Throws std::logic_error if not running.
    void stop();
    [[nodiscard]] bool running() const noexcept { return thread_.joinable(); }

    [[nodiscard]] const ServerConfig& config() const noexcept { return config_; }

    /// Adds and removes this server completed. Safe to read while running.
    [[nodiscard]] OpCounters counters() const noexcept;

    /// Audit trail for the server's own slot transitions; nullptr disables logging.
    void set_audit(AuditLog* audit) noexcept { audit_ = audit; }

private:
    void serve_remove(std::size_t i, SlotWord seen, ScanStats& stats);
    void serve_add(std::size_t i, SlotWord seen, ScanStats& stats);
    void run();

    DualSkiplist& skiplist_;
    EliminationArray& elim_;
    ServerConfig config_;
    AuditLog* audit_ = nullptr;
    std::uint32_t idle_scans_ = 0;

    std::atomic<std::uint64_t> add_srv_{0};
    std::atomic<std::uint64_t> rem_srv_{0};
    std::atomic<bool> stop_requested_{false};
    std::thread thread_;
};

}  // namespace pqe
