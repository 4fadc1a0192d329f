#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pqe/key.hpp"

namespace pqe::bench {

enum class QueueImpl { pqe_eager, pqe_lazy, locked_heap, locked_skiplist };

std::string_view to_string(QueueImpl impl) noexcept;
/// Accepts "pqe-eager", "pqe-lazy", "locked-heap", "locked-skiplist".
std::optional<QueueImpl> parse_impl(std::string_view name) noexcept;

struct WorkloadConfig {
    std::uint32_t threads = 1;  ///< worker threads, excluding the server
    double p = 0.5;             ///< probability that an operation is an add
    std::uint64_t prefill = 2000;
    double seconds = 10.0;
    std::uint64_t seed = 1;
    QueueImpl impl = QueueImpl::pqe_eager;

    /// Throws std::invalid_argument describing the first problem.
    void validate() const;
};

struct RunStats {
    std::uint64_t total_ops = 0;
    double ops_per_second = 0;
    std::uint64_t adds = 0;
    std::uint64_t removes = 0;
    std::uint64_t empty_removes = 0;
    std::uint64_t add_par = 0;
    std::uint64_t add_elim = 0;
    std::uint64_t add_srv = 0;
    std::uint64_t rem_elim = 0;
    std::uint64_t rem_srv = 0;
    std::uint64_t head_moves = 0;
    std::uint64_t chop_heads = 0;
    /// (head_moves + chop_heads) / removes, as a fraction; 0 without removes.
    double headmove_pct = 0;
};

/// Deterministic operation sequence for one worker. Generator: std::mt19937_64
/// seeded with seed ^ (0x9E3779B97F4A7C15 * (thread + 1)). Each operation
/// draws one 64-bit word for the coin (top 53 bits as a fraction in [0,1),
/// add iff below p) and, for adds, a second word mapped to the admissible
/// range by modulo.
class OpStream {
public:
    struct Op {
        bool is_add;
        Key key;  ///< 0 for removals
        friend bool operator==(const Op&, const Op&) = default;
    };

    OpStream(std::uint64_t seed, std::uint32_t thread, double p);
    Op next();
    Key next_key();

private:
    std::mt19937_64 rng_;
    double p_;
};

/// Prefills, runs every worker for cfg.seconds and aggregates the counters.
RunStats run_benchmark(const WorkloadConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "impl,threads,p,prefill,seconds,seed,ops,ops_per_sec,add_par,add_elim,add_srv,rem_elim,rem_srv,"
    "head_moves,chop_heads,headmove_pct";

std::string csv_row(const RunStats& stats, const WorkloadConfig& cfg);
/// Row recorded for a run that failed; `ops` holds the marker "error".
std::string csv_error_row(const WorkloadConfig& cfg);

struct CsvRecord {
    WorkloadConfig cfg;
    RunStats stats;
    bool error = false;
};
/// Inverse of csv_row / csv_error_row. Fields not stored in the CSV stay zero.
CsvRecord parse_csv_row(std::string_view line);

/// Appends one row, writing the header first if the file is new or empty.
/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const RunStats& stats, const WorkloadConfig& cfg, const std::filesystem::path& path);

struct SweepResult {
    WorkloadConfig cfg;
    std::optional<RunStats> stats;  ///< nullopt if the run failed
    std::string error;
};

/// Cross product impls x threads x ps in that nesting order. Run i uses
/// seed cfg_template.seed + i. Each result is appended to `out` when it is
/// non-empty. Repeated list entries produce repeated runs.
std::vector<SweepResult> sweep(const WorkloadConfig& cfg_template, const std::vector<QueueImpl>& impls,
                               const std::vector<std::uint32_t>& thread_list, const std::vector<double>& p_list,
                               const std::filesystem::path& out = {},
                               const std::function<RunStats(const WorkloadConfig&)>& runner = run_benchmark);

}  // namespace pqe::bench
