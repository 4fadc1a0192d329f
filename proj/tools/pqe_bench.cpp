// Throughput benchmark driver. Writes one CSV row per run.
//
//   pqe_bench --impl pqe --threads 4 --p 0.5 --seconds 10
//   pqe_bench --impl pqe,locked-heap --sweep-threads 1,2,4 --sweep-p 0.5,0.8 --out runs.csv

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "pqe/bench/workload.hpp"

namespace {

std::vector<pqe::bench::QueueImpl> resolve_impls(const std::vector<std::string>& names, const std::string& strategy) {
    std::vector<pqe::bench::QueueImpl> impls;
    for (const auto& name : names) {
        if (name == "pqe") {
            impls.push_back(strategy == "lazy" ? pqe::bench::QueueImpl::pqe_lazy : pqe::bench::QueueImpl::pqe_eager);
        } else if (auto impl = pqe::bench::parse_impl(name)) {
            impls.push_back(*impl);
        } else {
            throw CLI::ValidationError("--impl", "unknown implementation '" + name + "'");
        }
    }
    return impls;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Priority queue throughput benchmark"};

    pqe::bench::WorkloadConfig cfg;
    std::vector<std::string> impl_names{"pqe"};
    std::string strategy = "eager";
    std::string out;
    std::vector<std::uint32_t> sweep_threads;
    std::vector<double> sweep_p;

    app.add_option("--impl", impl_names, "pqe, pqe-eager, pqe-lazy, locked-heap, locked-skiplist (comma list)")
        ->delimiter(',');
    app.add_option("--threads", cfg.threads, "worker threads, server excluded")->capture_default_str();
    app.add_option("--p", cfg.p, "probability that an operation is an add")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--prefill", cfg.prefill, "random keys inserted before timing")->capture_default_str();
    app.add_option("--seconds", cfg.seconds, "timed duration per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed; sweep run i uses seed + i")->capture_default_str();
    app.add_option("--out", out, "CSV file to append to (stdout when omitted)");
    app.add_option("--sweep-threads", sweep_threads, "thread counts to sweep")->delimiter(',');
    app.add_option("--sweep-p", sweep_p, "add probabilities to sweep")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    app.add_option("--strategy", strategy, "server strategy used by --impl pqe")
        ->check(CLI::IsMember({"eager", "lazy"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    std::vector<pqe::bench::QueueImpl> impls;
    try {
        impls = resolve_impls(impl_names, strategy);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
    if (sweep_threads.empty()) sweep_threads.push_back(cfg.threads);
    if (sweep_p.empty()) sweep_p.push_back(cfg.p);

    // Catch misconfiguration before any run starts.
    try {
        for (auto impl : impls) {
            for (auto t : sweep_threads) {
                auto probe = cfg;
                probe.impl = impl;
                probe.threads = t;
                probe.validate();
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "pqe_bench: " << e.what() << '\n';
        return 2;
    }

    if (out.empty()) std::cout << pqe::bench::kCsvHeader << '\n' << std::flush;
    int failures = 0;
    try {
        auto runner = [&](const pqe::bench::WorkloadConfig& run_cfg) {
            std::cerr << "running " << pqe::bench::to_string(run_cfg.impl) << " threads=" << run_cfg.threads
                      << " p=" << run_cfg.p << " seed=" << run_cfg.seed << '\n';
            auto stats = pqe::bench::run_benchmark(run_cfg);
            if (out.empty()) std::cout << pqe::bench::csv_row(stats, run_cfg) << '\n' << std::flush;
            return stats;
        };
        for (const auto& r : pqe::bench::sweep(cfg, impls, sweep_threads, sweep_p, out, runner)) {
            if (!r.stats) {
                ++failures;
                std::cerr << "run failed: " << r.error << '\n';
                if (out.empty()) std::cout << pqe::bench::csv_error_row(r.cfg) << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "pqe_bench: " << e.what() << '\n';
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
