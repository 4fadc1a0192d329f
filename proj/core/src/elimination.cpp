#include "pqe/elimination.hpp"

#include <cassert>

#include "pqe/backoff.hpp"

namespace pqe {

EliminationArray::EliminationArray(std::size_t size)
    : size_(size == 0 ? 1 : size), slots_(std::make_unique<Slot[]>(size_)) {}

bool EliminationArray::at_rest() const noexcept {
    for (std::size_t i = 0; i < size_; ++i) {
        if (!load(i).is_empty()) return false;
    }
    return true;
}

namespace {

std::size_t start_position(const ClientContext& ctx, const EliminationArray& elim) {
    return (ctx.id + 1) % elim.size();
}

std::size_t advance(std::size_t pos, const EliminationArray& elim) {
    return pos + 1 == elim.size() ? 0 : pos + 1;
}

void log_elimination(ClientContext& ctx, Key value, Key observed_min) {
    if (ctx.audit != nullptr) ctx.audit->eliminations.push_back({value, observed_min});
}

/// Hands `v` to a waiting removal in slot `pos` if one is there and `v` is no
/// larger than the current minimum.
bool try_hand_off(Key v, std::size_t pos, SlotWord seen, ClientContext& ctx, EliminationArray& elim,
                  const DualSkiplist& skiplist) {
    if (!seen.is_remove_request()) return false;
    const Key m = skiplist.min_value();
    if (v > m) return false;
    if (!elim.cas(pos, seen, SlotWord{v, 0}, ctx.audit)) return false;
    log_elimination(ctx, v, m);
    ++ctx.counters.add_elim;
    ++ctx.counters.rem_elim;
    return true;
}

}  // namespace

Key eliminating_remove_min(ClientContext& ctx, EliminationArray& elim, DualSkiplist& skiplist) {
    std::size_t pos = start_position(ctx, elim);
    std::size_t probed = 0;
    Backoff backoff;
    for (;;) {
        const SlotWord seen = elim.load(pos);
        if (seen.is_add_request()) {
            const Key m = skiplist.min_value();
            if (seen.value <= m && elim.cas(pos, seen, SlotWord{opcode::kTaken, 0}, ctx.audit)) {
                log_elimination(ctx, seen.value, m);
                ++ctx.counters.rem_elim;
                ++ctx.counters.add_elim;
                return seen.value;
            }
        }
        if (seen.is_empty()) {
            const SlotWord request{opcode::kRemReq, ctx.stamps.next()};
            if (elim.cas(pos, seen, request, ctx.audit)) {
                Backoff wait;
                SlotWord reply = elim.load(pos);
                while (reply.is_remove_request() || reply.is_in_progress()) {
                    wait.pause();
                    reply = elim.load(pos);
                }
                assert(reply.is_response());
                elim.store(pos, reply, SlotWord{}, ctx.audit);
                return reply.value;
            }
        }
        pos = advance(pos, elim);
        if (++probed % elim.size() == 0) backoff.pause();
    }
}

void eliminating_add(Key v, ClientContext& ctx, EliminationArray& elim, DualSkiplist& skiplist,
                     const EliminationParams& params) {
    std::uint32_t rounds = 0;
    if (v <= skiplist.min_value()) {
        rounds = params.max_elim_min;
    } else {
        if (skiplist.add_par(v, ctx.id, ctx.levels)) {
            ++ctx.counters.add_par;
            return;
        }
        rounds = params.max_elim;
    }

    std::size_t pos = start_position(ctx, elim);
    for (; rounds > 0; --rounds) {
        if (try_hand_off(v, pos, elim.load(pos), ctx, elim, skiplist)) return;
        pos = advance(pos, elim);
    }

    if (skiplist.add_par(v, ctx.id, ctx.levels)) {
        ++ctx.counters.add_par;
        return;
    }

    std::size_t probed = 0;
    Backoff backoff;
    for (;;) {
        const SlotWord seen = elim.load(pos);
        if (try_hand_off(v, pos, seen, ctx, elim, skiplist)) return;
        if (seen.is_empty()) {
            const SlotWord request{v, ctx.stamps.next()};
            if (elim.cas(pos, seen, request, ctx.audit)) {
                Backoff wait;
                SlotWord state = elim.load(pos);
                while (!state.is_taken()) {
                    wait.pause();
                    state = elim.load(pos);
                }
                elim.store(pos, state, SlotWord{}, ctx.audit);
                return;
            }
        }
        pos = advance(pos, elim);
        if (++probed % elim.size() == 0) backoff.pause();
    }
}

}  // namespace pqe
