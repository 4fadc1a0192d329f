#pragma once

#include <cstdint>
#include <thread>

namespace pqe {

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#elif defined(__aarch64__)
    asm volatile("yield");
#endif
}

/// Bounded exponential spin followed by yielding. On a single hardware
/// thread spinning can never observe progress, so it yields immediately.
class Backoff {
public:
    Backoff() noexcept : limit_(single_cpu() ? 0 : kSpinLimit) {}

    void pause() noexcept {
        if (spins_ < limit_) {
            for (std::uint32_t i = 0; i < spins_ + 1; ++i) cpu_relax();
            spins_ = spins_ == 0 ? 1 : spins_ * 2;
        } else {
            std::this_thread::yield();
        }
    }

    void reset() noexcept { spins_ = 0; }

private:
    static constexpr std::uint32_t kSpinLimit = 1024;

    static bool single_cpu() noexcept {
        static const bool single = std::thread::hardware_concurrency() <= 1;
        return single;
    }

    std::uint32_t limit_;
    std::uint32_t spins_ = 0;
};

}  // namespace pqe
