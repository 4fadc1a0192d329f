#include "pqe/lincheck/checker.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "pqe/baselines.hpp"

namespace pqe::lincheck {

namespace {

constexpr std::uint64_t kPending = std::numeric_limits<std::uint64_t>::max();

struct BudgetExceeded {};

/// Depth-first search over per-thread progress vectors. Because every
/// removal's result is fixed by the history, the queue contents are a
/// function of which operations have been linearized, so a progress vector
/// fully identifies a search state and failed states can be memoized.
class Search {
public:
    /// `lanes[t]` lists record indices of thread t in invocation order; the
    /// first `mandatory[t]` must be linearized, the rest may be.
    Search(const History& h, std::vector<std::vector<std::size_t>> lanes, std::vector<std::size_t> mandatory,
           std::vector<std::uint64_t> effective_response, std::uint64_t budget)
        : h_(h),
          lanes_(std::move(lanes)),
          mandatory_(std::move(mandatory)),
          response_(std::move(effective_response)),
          progress_(lanes_.size(), 0),
          budget_(budget) {}

    Outcome run() {
        try {
            return dfs() ? Outcome::linearizable : Outcome::not_linearizable;
        } catch (const BudgetExceeded&) {
            return Outcome::inconclusive;
        }
    }

    [[nodiscard]] const std::vector<std::size_t>& path() const { return path_; }
    [[nodiscard]] std::uint64_t states() const { return states_; }

private:
    bool done() const {
        for (std::size_t t = 0; t < lanes_.size(); ++t) {
            if (progress_[t] < mandatory_[t]) return false;
        }
        return true;
    }

    std::string state_key() const {
        std::string key(progress_.size() * 2, '\0');
        for (std::size_t t = 0; t < progress_.size(); ++t) {
            key[2 * t] = static_cast<char>(progress_[t] & 0xFF);
            key[2 * t + 1] = static_cast<char>(progress_[t] >> 8);
        }
        return key;
    }

    bool apply(const OpRecord& r) {
        if (r.op == OpKind::add) {
            ++contents_[r.arg];
            return true;
        }
        if (!r.result) return contents_.empty();
        if (contents_.empty() || contents_.begin()->first != *r.result) return false;
        auto it = contents_.begin();
        if (--it->second == 0) contents_.erase(it);
        return true;
    }

    void undo(const OpRecord& r) {
        if (r.op == OpKind::add) {
            auto it = contents_.find(r.arg);
            if (--it->second == 0) contents_.erase(it);
        } else if (r.result) {
            ++contents_[*r.result];
        }
    }

    bool dfs() {
        if (done()) return true;
        if (++states_ > budget_) throw BudgetExceeded{};
        std::string key = state_key();
        if (dead_.count(key) != 0) return false;

        std::uint64_t earliest_response = kPending;
        for (std::size_t t = 0; t < lanes_.size(); ++t) {
            if (progress_[t] < lanes_[t].size()) {
                earliest_response = std::min(earliest_response, response_[lanes_[t][progress_[t]]]);
            }
        }
        for (std::size_t t = 0; t < lanes_.size(); ++t) {
            if (progress_[t] >= lanes_[t].size()) continue;
            const std::size_t idx = lanes_[t][progress_[t]];
            const OpRecord& r = h_.records[idx];
            if (r.invoke > earliest_response) continue;
            if (!apply(r)) continue;
            ++progress_[t];
            path_.push_back(idx);
            if (dfs()) return true;
            path_.pop_back();
            --progress_[t];
            undo(r);
        }
        dead_.insert(std::move(key));
        return false;
    }

    const History& h_;
    std::vector<std::vector<std::size_t>> lanes_;
    std::vector<std::size_t> mandatory_;
    std::vector<std::uint64_t> response_;
    std::vector<std::size_t> progress_;
    std::map<Key, std::uint32_t> contents_;
    std::unordered_set<std::string> dead_;
    std::vector<std::size_t> path_;
    std::uint64_t states_ = 0;
    std::uint64_t budget_;
};

/// Sub-history visible at tick `cut`: operations that responded by then are
/// mandatory, operations invoked but not yet responded are optional.
struct Cut {
    std::vector<std::vector<std::size_t>> lanes;
    std::vector<std::size_t> mandatory;
    std::vector<std::uint64_t> response;
    std::vector<std::size_t> members;
};

Cut make_cut(const History& h, std::uint64_t cut) {
    std::map<std::uint32_t, std::vector<std::size_t>> by_thread;
    Cut c;
    c.response.assign(h.records.size(), kPending);
    for (std::size_t i = 0; i < h.records.size(); ++i) {
        const auto& r = h.records[i];
        if (r.invoke > cut) continue;
        by_thread[r.thread].push_back(i);
        c.members.push_back(i);
        if (r.response <= cut) c.response[i] = r.response;
    }
    for (auto& [thread, ops] : by_thread) {
        std::sort(ops.begin(), ops.end(),
                  [&h](std::size_t a, std::size_t b) { return h.records[a].invoke < h.records[b].invoke; });
        std::size_t must = 0;
        for (std::size_t i : ops) {
            if (c.response[i] != kPending) ++must;
        }
        c.mandatory.push_back(must);
        c.lanes.push_back(std::move(ops));
    }
    return c;
}

}  // namespace

Verdict check_linearizable(const History& h, const CheckOptions& options) {
    if (const auto problem = validate(h); !problem.empty()) {
        throw std::invalid_argument("malformed history: " + problem);
    }
    Verdict v;
    Cut full = make_cut(h, kPending - 1);
    Search search(h, full.lanes, full.mandatory, full.response, options.state_budget);
    v.outcome = search.run();
    v.states_explored = search.states();
    if (v.outcome == Outcome::linearizable) {
        v.witness = search.path();
        return v;
    }
    if (v.outcome == Outcome::inconclusive) return v;

    v.violating_prefix = full.members;
    if (!options.minimize) return v;

    // Linearizability is prefix-closed, so the rejecting cuts form a suffix of
    // the response order; binary search for the first one.
    std::vector<std::uint64_t> responses;
    for (const auto& r : h.records) responses.push_back(r.response);
    std::sort(responses.begin(), responses.end());
    std::size_t lo = 0;
    std::size_t hi = responses.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        Cut c = make_cut(h, responses[mid]);
        Search s(h, c.lanes, c.mandatory, c.response, options.state_budget);
        const Outcome o = s.run();
        v.states_explored += s.states();
        if (o == Outcome::not_linearizable) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    v.violating_prefix = make_cut(h, responses[lo]).members;
    return v;
}

bool replay(const History& h, const std::vector<std::size_t>& order) {
    LockedHeap heap;
    for (std::size_t idx : order) {
        const auto& r = h.records.at(idx);
        if (r.op == OpKind::add) {
            heap.add(r.arg);
        } else if (heap.remove_min() != r.result) {
            return false;
        }
    }
    return true;
}

}  // namespace pqe::lincheck
