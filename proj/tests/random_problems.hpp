#pragma once

#include "singdeg/minmax.hpp"

#include <random>

namespace fixtures {

/// Random DAG on vertices ordered by index with increasing boundary values,
/// so every boundary-to-boundary path has a non-negative gap.
inline singdeg::BoundaryProblem randomBoundaryProblem(std::mt19937_64& rng, singdeg::Index maxVertices = 12) {
    using singdeg::Index;
    std::uniform_int_distribution<Index> size(2, maxVertices);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> step(0, 4);
    singdeg::BoundaryProblem p;
    p.vertexCount = size(rng);
    const double density = 0.2 + 0.5 * unit(rng);
    std::vector<bool> hasIn(p.vertexCount), hasOut(p.vertexCount);
    for (Index a = 0; a < p.vertexCount; ++a) {
        for (Index b = a + 1; b < p.vertexCount; ++b) {
            if (unit(rng) < density) {
                p.edges.emplace_back(a, b);
                hasOut[a] = hasIn[b] = true;
            }
        }
    }
    std::int64_t level = 0;
    const std::int64_t denominator = 1 + step(rng);
    for (Index v = 0; v < p.vertexCount; ++v) {
        level += step(rng);
        if (!hasIn[v] || !hasOut[v] || unit(rng) < 0.15) p.boundary[v] = singdeg::Rational(level, denominator);
    }
    return p;
}

}  // namespace fixtures
