#include "digraph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace singdeg::detail {

std::vector<std::size_t> stronglyConnectedComponents(const Adjacency& out) {
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
    const std::size_t n = out.size();
    std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> onStack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, components = 0;

    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        onStack[root] = true;
        while (!call.empty()) {
            auto& frame = call.back();
            const auto v = frame.v;
            if (frame.next < out[v].size()) {
                const auto w = out[v][frame.next++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    onStack[w] = true;
                    call.push_back({w, 0});
                } else if (onStack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    comp[w] = components;
                } while (w != v);
                ++components;
            }
            call.pop_back();
            if (!call.empty()) {
                const auto parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

std::optional<std::vector<std::size_t>> topologicalOrder(const Adjacency& out) {
    const std::size_t n = out.size();
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& targets : out) {
        for (auto w : targets) ++indegree[w];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const auto v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto w : out[v]) {
            if (--indegree[w] == 0) ready.push(w);
        }
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

}  // namespace singdeg::detail
