#include "pqe/lincheck/history.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pqe::lincheck {

std::string validate(const History& h) {
    std::set<std::uint64_t> ticks;
    std::map<std::uint32_t, std::vector<const OpRecord*>> by_thread;
    for (const auto& r : h.records) {
        if (r.invoke >= r.response) return "record with invoke >= response";
        if (!ticks.insert(r.invoke).second || !ticks.insert(r.response).second) return "duplicate tick";
        by_thread[r.thread].push_back(&r);
    }
    for (auto& [thread, ops] : by_thread) {
        std::sort(ops.begin(), ops.end(), [](auto* a, auto* b) { return a->invoke < b->invoke; });
        for (std::size_t i = 1; i < ops.size(); ++i) {
            if (ops[i]->invoke < ops[i - 1]->response) {
                return "overlapping operations on thread " + std::to_string(thread);
            }
        }
    }
    return {};
}

std::string serialize(const History& h) {
    std::ostringstream out;
    out << "# pqe history v1\n";
    if (h.truncated) out << "# truncated\n";
    for (const auto& r : h.records) {
        out << r.thread << ' ';
        if (r.op == OpKind::add) {
            out << "add " << r.arg << ' ' << r.invoke << ' ' << r.response << " -\n";
        } else {
            out << "rem - " << r.invoke << ' ' << r.response << ' ';
            if (r.result) {
                out << *r.result;
            } else {
                out << "empty";
            }
            out << '\n';
        }
    }
    return out.str();
}

History parse(std::string_view text) {
    History h;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("truncated") != std::string::npos) h.truncated = true;
            continue;
        }
        std::istringstream fields(line);
        OpRecord r;
        std::string op, arg, result;
        if (!(fields >> r.thread >> op >> arg >> r.invoke >> r.response >> result)) {
            throw std::invalid_argument("history line " + std::to_string(line_no) + ": expected 6 fields");
        }
        try {
            if (op == "add") {
                r.op = OpKind::add;
                r.arg = static_cast<Key>(std::stoul(arg));
            } else if (op == "rem") {
                r.op = OpKind::remove_min;
                if (result != "empty") r.result = static_cast<Key>(std::stoul(result));
            } else {
                throw std::invalid_argument("unknown op");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("history line " + std::to_string(line_no) + ": bad field");
        }
        h.records.push_back(r);
    }
    return h;
}

}  // namespace pqe::lincheck
