#pragma once

// Small directed-graph helpers shared by the combinatorial modules.

#include <cstddef>
#include <optional>
#include <vector>

namespace singdeg::detail {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected component id per vertex (Tarjan, iterative).
std::vector<std::size_t> stronglyConnectedComponents(const Adjacency& out);

/// Kahn topological order with smallest-index-first tie breaking; nullopt if cyclic.
std::optional<std::vector<std::size_t>> topologicalOrder(const Adjacency& out);

}  // namespace singdeg::detail
