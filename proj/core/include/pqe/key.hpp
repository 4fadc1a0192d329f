#pragma once

#include <cstdint>
#include <optional>

namespace pqe {

/// Priority value stored in the queue. Smaller keys are removed first.
using Key = std::uint32_t;

/// Empty sentinel: returned by the sequential part when no live key exists,
/// and the resting value of the cached minimum.
inline constexpr Key kMaxInt = 0xFFFFFFFFu;

/// Values 0..3 are elimination-slot opcodes and kMaxInt is the empty
/// sentinel; everything in between is a usable priority.
inline constexpr Key kMinKey = 4;
inline constexpr Key kMaxKey = kMaxInt - 1;

constexpr bool is_admissible(Key v) noexcept { return v >= kMinKey && v <= kMaxKey; }

/// Maps the internal empty sentinel to the public "empty" indicator.
constexpr std::optional<Key> to_result(Key v) noexcept {
    return v == kMaxInt ? std::nullopt : std::optional<Key>{v};
}

}  // namespace pqe
