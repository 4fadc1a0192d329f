#pragma once

#include <cstdint>
#include <stdexcept>

#include "pqe/key.hpp"

namespace pqe {

/// Reserved slot values. They sit below kMinKey so they never collide with a key.
namespace opcode {
inline constexpr std::uint32_t kEmpty = 0;
inline constexpr std::uint32_t kRemReq = 1;
inline constexpr std::uint32_t kTaken = 2;
inline constexpr std::uint32_t kInProg = 3;
}  // namespace opcode

constexpr bool is_opcode(std::uint32_t v) noexcept { return v <= opcode::kInProg; }
/// Anything that is not an opcode: an admissible key, or kMaxInt as an empty reply.
constexpr bool is_value(std::uint32_t v) noexcept { return !is_opcode(v); }

/// Unpacked elimination slot: a value-or-opcode in the high half and a stamp
/// in the low half of one 64-bit word.
struct SlotWord {
    std::uint32_t value = opcode::kEmpty;
    std::uint32_t stamp = 0;

    [[nodiscard]] constexpr std::uint64_t pack() const noexcept {
        return (std::uint64_t{value} << 32) | stamp;
    }
    static constexpr SlotWord unpack(std::uint64_t w) noexcept {
        return SlotWord{static_cast<std::uint32_t>(w >> 32), static_cast<std::uint32_t>(w)};
    }

    [[nodiscard]] constexpr bool is_empty() const noexcept { return value == opcode::kEmpty; }
    [[nodiscard]] constexpr bool is_remove_request() const noexcept { return value == opcode::kRemReq; }
    [[nodiscard]] constexpr bool is_taken() const noexcept { return value == opcode::kTaken; }
    [[nodiscard]] constexpr bool is_in_progress() const noexcept { return value == opcode::kInProg; }
    /// A posted add: a value carrying its poster's stamp.
    [[nodiscard]] constexpr bool is_add_request() const noexcept { return is_value(value) && stamp != 0; }
    /// A reply to a removal: a value (or kMaxInt) with stamp 0.
    [[nodiscard]] constexpr bool is_response() const noexcept { return is_value(value) && stamp == 0; }

    friend constexpr bool operator==(SlotWord, SlotWord) = default;
};

/// Whether (value, stamp) is a word the protocol can ever store: EMPTY, TAKEN
/// and INPROG carry stamp 0, REMREQ a nonzero stamp, kMaxInt only appears as
/// a reply, and keys may appear with or without a stamp.
constexpr bool is_well_formed(SlotWord w) noexcept {
    switch (w.value) {
        case opcode::kEmpty:
        case opcode::kTaken:
        case opcode::kInProg:
            return w.stamp == 0;
        case opcode::kRemReq:
            return w.stamp != 0;
        case kMaxInt:
            return w.stamp == 0;
        default:
            return true;
    }
}

/// Checked encoder. Throws std::invalid_argument for malformed words.
inline std::uint64_t encode_slot(std::uint32_t value, std::uint32_t stamp) {
    const SlotWord w{value, stamp};
    if (!is_well_formed(w)) throw std::invalid_argument("malformed elimination slot word");
    return w.pack();
}

constexpr SlotWord decode_slot(std::uint64_t word) noexcept { return SlotWord::unpack(word); }

/// Edges of the slot state machine. Everything else is a protocol violation.
constexpr bool is_permitted_transition(SlotWord from, SlotWord to) noexcept {
    if (from.is_empty()) return to.is_remove_request() || to.is_add_request();
    if (from.is_remove_request()) return to.is_in_progress() || to.is_response();
    if (from.is_add_request()) return to.is_taken() || to.is_in_progress();
    if (from.is_in_progress()) return to.is_response() || to.is_taken();
    if (from.is_response() || from.is_taken()) return to.is_empty() && to.stamp == 0;
    return false;
}

/// Per-operation tag: thread id in the top 8 bits, a 24-bit per-thread
/// operation count below. Never 0. The count wraps after 2^24 - 1 operations.
class StampSource {
public:
    explicit StampSource(std::uint32_t thread_id) : id_(thread_id) {
        if (thread_id > 0xFF) throw std::invalid_argument("thread id does not fit in a stamp");
    }

    std::uint32_t next() noexcept {
        count_ = (count_ + 1) & kCountMask;
        if (count_ == 0) count_ = 1;
        return (id_ << 24) | count_;
    }

    [[nodiscard]] std::uint32_t thread_id() const noexcept { return id_; }

    static constexpr std::uint32_t thread_of(std::uint32_t stamp) noexcept { return stamp >> 24; }
    static constexpr std::uint32_t count_of(std::uint32_t stamp) noexcept { return stamp & kCountMask; }

private:
    static constexpr std::uint32_t kCountMask = 0xFFFFFF;
    std::uint32_t id_;
    std::uint32_t count_ = 0;
};

}  // namespace pqe
