#include "pqe/bench/workload.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pqe/backoff.hpp"
#include "pqe/baselines.hpp"
#include "pqe/priority_queue.hpp"

namespace pqe::bench {

std::string_view to_string(QueueImpl impl) noexcept {
    switch (impl) {
        case QueueImpl::pqe_eager: return "pqe-eager";
        case QueueImpl::pqe_lazy: return "pqe-lazy";
        case QueueImpl::locked_heap: return "locked-heap";
        case QueueImpl::locked_skiplist: return "locked-skiplist";
    }
    return "unknown";
}

std::optional<QueueImpl> parse_impl(std::string_view name) noexcept {
    for (auto impl : {QueueImpl::pqe_eager, QueueImpl::pqe_lazy, QueueImpl::locked_heap, QueueImpl::locked_skiplist}) {
        if (to_string(impl) == name) return impl;
    }
    return std::nullopt;
}

namespace {

bool is_pqe(QueueImpl impl) { return impl == QueueImpl::pqe_eager || impl == QueueImpl::pqe_lazy; }

}  // namespace

void WorkloadConfig::validate() const {
    if (threads == 0) throw std::invalid_argument("threads must be at least 1");
    // One of the 256 thread slots is reserved for the server.
    if (is_pqe(impl) && threads > kMaxClientThreads - 1) {
        throw std::invalid_argument("pqe supports at most 255 worker threads");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
    if (!(seconds > 0.0)) throw std::invalid_argument("seconds must be positive");
}

OpStream::OpStream(std::uint64_t seed, std::uint32_t thread, double p)
    : rng_(seed ^ (0x9E3779B97F4A7C15ULL * (std::uint64_t{thread} + 1))), p_(p) {}

Key OpStream::next_key() {
    constexpr std::uint64_t span = std::uint64_t{kMaxKey} - kMinKey + 1;
    return static_cast<Key>(kMinKey + rng_() % span);
}

OpStream::Op OpStream::next() {
    const double coin = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (coin < p_) return Op{true, next_key()};
    return Op{false, 0};
}

namespace {

struct WorkerTally {
    std::uint64_t adds = 0;
    std::uint64_t removes = 0;
    std::uint64_t empty_removes = 0;
};

/// Runs one session per worker until the deadline. `session(t)` returns an
/// object with add(Key) and remove_min() -> optional<Key>.
template <typename MakeSession>
std::pair<std::vector<WorkerTally>, double> drive(const WorkloadConfig& cfg, MakeSession&& make_session) {
    std::atomic<bool> stop{false};
    std::atomic<std::uint32_t> ready{0};
    std::atomic<bool> go{false};
    std::vector<WorkerTally> tallies(cfg.threads);
    std::vector<std::thread> workers;
    workers.reserve(cfg.threads);
    for (std::uint32_t t = 0; t < cfg.threads; ++t) {
        workers.emplace_back([&, t] {
            auto session = make_session(t);
            OpStream ops(cfg.seed, t, cfg.p);
            WorkerTally tally;
            ready.fetch_add(1);
            Backoff wait;
            while (!go.load(std::memory_order_acquire)) wait.pause();
            while (!stop.load(std::memory_order_relaxed)) {
                const auto op = ops.next();
                if (op.is_add) {
                    session.add(op.key);
                    ++tally.adds;
                } else {
                    if (!session.remove_min()) ++tally.empty_removes;
                    ++tally.removes;
                }
            }
            tallies[t] = tally;
        });
    }
    Backoff wait;
    while (ready.load() < cfg.threads) wait.pause();
    const auto begin = std::chrono::steady_clock::now();
    go.store(true, std::memory_order_release);
    std::this_thread::sleep_for(std::chrono::duration<double>(cfg.seconds));
    stop.store(true, std::memory_order_relaxed);
    for (auto& w : workers) w.join();
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    return {std::move(tallies), elapsed};
}

void fill_totals(RunStats& s, const std::vector<WorkerTally>& tallies, double elapsed) {
    for (const auto& t : tallies) {
        s.adds += t.adds;
        s.removes += t.removes;
        s.empty_removes += t.empty_removes;
    }
    s.total_ops = s.adds + s.removes;
    s.ops_per_second = elapsed > 0 ? static_cast<double>(s.total_ops) / elapsed : 0.0;
}

RunStats run_pqe(const WorkloadConfig& cfg) {
    QueueConfig qc;
    qc.max_threads = cfg.threads;
    qc.strategy = cfg.impl == QueueImpl::pqe_lazy ? ServerStrategy::lazy : ServerStrategy::eager;
    qc.seed = cfg.seed;
    PriorityQueue pq(qc);
    pq.start();
    {
        auto filler = pq.register_thread();
        OpStream keys(cfg.seed, 0xFFFF, 1.0);
        for (std::uint64_t i = 0; i < cfg.prefill; ++i) filler.add(keys.next_key());
    }
    const QueueStats before = pq.stats();

    auto [tallies, elapsed] = drive(cfg, [&pq](std::uint32_t) {
        struct Session {
            PriorityQueue::Client client;
            void add(Key v) { client.add(v); }
            std::optional<Key> remove_min() { return client.remove_min(); }
        };
        return Session{pq.register_thread()};
    });
    pq.stop();

    const QueueStats after = pq.stats();
    const OpCounters ops = after.ops - before.ops;
    RunStats s;
    fill_totals(s, tallies, elapsed);
    s.add_par = ops.add_par;
    s.add_elim = ops.add_elim;
    s.add_srv = ops.add_srv;
    s.rem_elim = ops.rem_elim;
    s.rem_srv = ops.rem_srv;
    s.head_moves = after.head_moves - before.head_moves;
    s.chop_heads = after.chop_heads - before.chop_heads;
    s.headmove_pct = s.removes > 0 ? static_cast<double>(s.head_moves + s.chop_heads) / static_cast<double>(s.removes)
                                   : 0.0;
    return s;
}

template <typename Queue>
RunStats run_locked(const WorkloadConfig& cfg) {
    Queue q;
    OpStream keys(cfg.seed, 0xFFFF, 1.0);
    for (std::uint64_t i = 0; i < cfg.prefill; ++i) q.add(keys.next_key());
    auto [tallies, elapsed] = drive(cfg, [&q](std::uint32_t) {
        struct Session {
            Queue* q;
            void add(Key v) { q->add(v); }
            std::optional<Key> remove_min() { return q->remove_min(); }
        };
        return Session{&q};
    });
    RunStats s;
    fill_totals(s, tallies, elapsed);
    // Every operation is executed under the lock by its caller.
    s.add_srv = s.adds;
    s.rem_srv = s.removes;
    return s;
}

template <typename T>
void append_number(std::string& out, T value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, end);
}

template <typename T>
T parse_number(std::string_view field, std::string_view name) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::invalid_argument("csv: bad " + std::string(name) + " field '" + std::string(field) + "'");
    }
    return value;
}

std::string config_prefix(const WorkloadConfig& cfg) {
    std::string row(to_string(cfg.impl));
    row += ',';
    append_number(row, cfg.threads);
    row += ',';
    append_number(row, cfg.p);
    row += ',';
    append_number(row, cfg.prefill);
    row += ',';
    append_number(row, cfg.seconds);
    row += ',';
    append_number(row, cfg.seed);
    return row;
}

}  // namespace

RunStats run_benchmark(const WorkloadConfig& cfg) {
    cfg.validate();
    switch (cfg.impl) {
        case QueueImpl::pqe_eager:
        case QueueImpl::pqe_lazy: return run_pqe(cfg);
        case QueueImpl::locked_heap: return run_locked<LockedHeap>(cfg);
        case QueueImpl::locked_skiplist: return run_locked<LockedSkiplist>(cfg);
    }
    throw std::invalid_argument("unknown queue implementation");
}

std::string csv_row(const RunStats& s, const WorkloadConfig& cfg) {
    std::string row = config_prefix(cfg);
    for (std::uint64_t v : {s.total_ops}) {
        row += ',';
        append_number(row, v);
    }
    row += ',';
    append_number(row, s.ops_per_second);
    for (std::uint64_t v : {s.add_par, s.add_elim, s.add_srv, s.rem_elim, s.rem_srv, s.head_moves, s.chop_heads}) {
        row += ',';
        append_number(row, v);
    }
    row += ',';
    append_number(row, s.headmove_pct);
    return row;
}

std::string csv_error_row(const WorkloadConfig& cfg) { return config_prefix(cfg) + ",error,,,,,,,,,"; }

CsvRecord parse_csv_row(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (fields.size() != 16) throw std::invalid_argument("csv: expected 16 fields, got " + std::to_string(fields.size()));
    CsvRecord rec;
    const auto impl = parse_impl(fields[0]);
    if (!impl) throw std::invalid_argument("csv: unknown impl '" + std::string(fields[0]) + "'");
    rec.cfg.impl = *impl;
    rec.cfg.threads = parse_number<std::uint32_t>(fields[1], "threads");
    rec.cfg.p = parse_number<double>(fields[2], "p");
    rec.cfg.prefill = parse_number<std::uint64_t>(fields[3], "prefill");
    rec.cfg.seconds = parse_number<double>(fields[4], "seconds");
    rec.cfg.seed = parse_number<std::uint64_t>(fields[5], "seed");
    if (fields[6] == "error") {
        rec.error = true;
        return rec;
    }
    auto& s = rec.stats;
    s.total_ops = parse_number<std::uint64_t>(fields[6], "ops");
    s.ops_per_second = parse_number<double>(fields[7], "ops_per_sec");
    s.add_par = parse_number<std::uint64_t>(fields[8], "add_par");
    s.add_elim = parse_number<std::uint64_t>(fields[9], "add_elim");
    s.add_srv = parse_number<std::uint64_t>(fields[10], "add_srv");
    s.rem_elim = parse_number<std::uint64_t>(fields[11], "rem_elim");
    s.rem_srv = parse_number<std::uint64_t>(fields[12], "rem_srv");
    s.head_moves = parse_number<std::uint64_t>(fields[13], "head_moves");
    s.chop_heads = parse_number<std::uint64_t>(fields[14], "chop_heads");
    s.headmove_pct = parse_number<double>(fields[15], "headmove_pct");
    s.adds = s.add_par + s.add_elim + s.add_srv;
    s.removes = s.rem_elim + s.rem_srv;
    return rec;
}

namespace {

void append_line(const std::filesystem::path& path, const std::string& row) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for appending");
    if (fresh) out << kCsvHeader << '\n';
    out << row << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

void emit_csv(const RunStats& stats, const WorkloadConfig& cfg, const std::filesystem::path& path) {
    append_line(path, csv_row(stats, cfg));
}

std::vector<SweepResult> sweep(const WorkloadConfig& cfg_template, const std::vector<QueueImpl>& impls,
                               const std::vector<std::uint32_t>& thread_list, const std::vector<double>& p_list,
                               const std::filesystem::path& out,
                               const std::function<RunStats(const WorkloadConfig&)>& runner) {
    if (impls.empty() || thread_list.empty() || p_list.empty()) {
        throw std::invalid_argument("sweep lists must be non-empty");
    }
    std::vector<SweepResult> results;
    std::uint64_t index = 0;
    for (QueueImpl impl : impls) {
        for (std::uint32_t threads : thread_list) {
            for (double p : p_list) {
                SweepResult r;
                r.cfg = cfg_template;
                r.cfg.impl = impl;
                r.cfg.threads = threads;
                r.cfg.p = p;
                r.cfg.seed = cfg_template.seed + index++;
                try {
                    r.stats = runner(r.cfg);
                } catch (const std::exception& e) {
                    r.error = e.what();
                }
                if (!out.empty()) append_line(out, r.stats ? csv_row(*r.stats, r.cfg) : csv_error_row(r.cfg));
                results.push_back(std::move(r));
            }
        }
    }
    return results;
}

}  // namespace pqe::bench
