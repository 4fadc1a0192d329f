#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqe/key.hpp"

namespace pqe::lincheck {

enum class OpKind { add, remove_min };

/// One completed operation with its invocation and response ticks.
struct OpRecord {
    std::uint32_t thread = 0;
    OpKind op = OpKind::add;
    Key arg = 0;                ///< added value; unused for remove_min
    std::uint64_t invoke = 0;
    std::uint64_t response = 0;
    std::optional<Key> result;  ///< removed value; nullopt = empty (or add)

    friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

struct History {
    std::vector<OpRecord> records;
    bool truncated = false;

    friend bool operator==(const History&, const History&) = default;
};

/// Empty string if the history is well formed (invoke < response, unique
/// ticks, per-thread operations non-overlapping), otherwise the first problem.
std::string validate(const History& h);

/// Line format, one record per line:
///   <thread> add <value> <invoke> <response> -
///   <thread> rem - <invoke> <response> <value|empty>
/// Lines starting with '#' are comments; "# truncated" marks a truncated window.
std::string serialize(const History& h);
/// Throws std::invalid_argument on a malformed line.
History parse(std::string_view text);

}  // namespace pqe::lincheck
