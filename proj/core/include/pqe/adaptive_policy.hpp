#pragma once

#include <cstdint>

namespace pqe {

/// Parameters of the batch-size policy used when detaching a new sequential
/// part. `halve_above` and `double_below` are the insertion thresholds.
struct AdaptiveParams {
    std::uint32_t min_batch = 8;
    std::uint32_t max_batch = 65536;
    std::uint32_t initial_batch = 8;
    std::uint64_t halve_above = 1000;
    std::uint64_t double_below = 100;
};

/// Halve when more than `halve_above` insertions hit the sequential part since
/// the previous move, double when fewer than `double_below` did, otherwise keep.
/// The result is clamped to [min_batch, max_batch].
constexpr std::uint32_t adapt_batch_size(std::uint32_t n, std::uint64_t insertions,
                                         const AdaptiveParams& params = {}) noexcept {
    std::uint64_t next = n;
    if (insertions > params.halve_above) {
        next = n / 2;
    } else if (insertions < params.double_below) {
        next = std::uint64_t{n} * 2;
    }
    if (next < params.min_batch) next = params.min_batch;
    if (next > params.max_batch) next = params.max_batch;
    return static_cast<std::uint32_t>(next);
}

class AdaptivePolicy {
public:
    explicit AdaptivePolicy(AdaptiveParams params = {}) noexcept
        : params_(params), batch_(params.initial_batch) {}

    /// Updates the batch size from the insertion count and returns it.
    std::uint32_t update(std::uint64_t insertions_since_move) noexcept {
        batch_ = adapt_batch_size(batch_, insertions_since_move, params_);
        return batch_;
    }

    [[nodiscard]] std::uint32_t batch() const noexcept { return batch_; }
    [[nodiscard]] const AdaptiveParams& params() const noexcept { return params_; }

private:
    AdaptiveParams params_;
    std::uint32_t batch_;
};

}  // namespace pqe
