#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pqe/lincheck/history.hpp"

namespace pqe::lincheck {

enum class Outcome { linearizable, not_linearizable, inconclusive };

struct Verdict {
    Outcome outcome = Outcome::inconclusive;
    /// On acceptance: record indices in one valid linearization order.
    std::vector<std::size_t> witness;
    /// On rejection: record indices of the shortest non-linearizable prefix
    /// (operations completed by some response, plus those still in flight).
    std::vector<std::size_t> violating_prefix;
    std::uint64_t states_explored = 0;
};

struct CheckOptions {
    std::uint64_t state_budget = 10'000'000;
    bool minimize = true;
};

/// Searches for a total order that extends real-time precedence and replays
/// on a sequential min-priority queue (remove on empty yields empty).
/// Throws std::invalid_argument if the history is not well formed.
Verdict check_linearizable(const History& h, const CheckOptions& options = {});

/// Replays records in the given order against a sequential heap. True if
/// every removal result matches.
bool replay(const History& h, const std::vector<std::size_t>& order);

}  // namespace pqe::lincheck
