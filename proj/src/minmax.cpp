#include "singdeg/minmax.hpp"

#include "digraph.hpp"
#include "singdeg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace singdeg {

namespace {

struct Graph {
    detail::Adjacency out, in;
    std::vector<Index> order;
};

Graph checkedGraph(const BoundaryProblem& p) {
    Graph g{detail::Adjacency(p.vertexCount), detail::Adjacency(p.vertexCount), {}};
    for (auto [a, b] : p.edges) {
        if (a >= p.vertexCount || b >= p.vertexCount) {
            throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
        }
        if (a == b) throw Error(ErrorCode::NotDAG, "self loop at vertex " + std::to_string(a));
        g.out[a].push_back(b);
        g.in[b].push_back(a);
    }
    for (auto* adj : {&g.out, &g.in}) {
        for (auto& list : *adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }
    auto order = detail::topologicalOrder(g.out);
    if (!order) throw Error(ErrorCode::NotDAG, "edge relation contains a cycle");
    g.order = std::move(*order);
    return g;
}

void checkBoundary(const BoundaryProblem& p, const Graph& g) {
    for (auto& [v, value] : p.boundary) {
        if (v >= p.vertexCount) throw Error(ErrorCode::InvalidArgument, "boundary vertex out of range");
    }
    for (Index v = 0; v < p.vertexCount; ++v) {
        if ((g.in[v].empty() || g.out[v].empty()) && !p.isBoundary(v)) {
            throw Error(ErrorCode::BadBoundary,
                        "vertex " + std::to_string(v) + " has an empty past or future but no boundary value");
        }
    }
    for (auto [a, b] : p.edges) {
        if (p.isBoundary(a) && p.isBoundary(b) && p.boundary.at(a) > p.boundary.at(b)) {
            throw Error(ErrorCode::BadBoundary, "boundary values decrease along edge " + std::to_string(a) +
                                                    " -> " + std::to_string(b));
        }
    }
}

struct Candidate {
    Rational slope;
    Index from = 0;
    Index to = 0;
    IndexList path;
};

// Smallest-slope path between assigned vertices through unassigned ones,
// using the longest such path for every endpoint pair.
std::optional<Candidate> bestPath(const Graph& g, const std::vector<std::optional<Rational>>& f) {
    const Index n = f.size();
    std::optional<Candidate> best;
    std::vector<Index> dist(n), parent(n);
    constexpr Index unreached = std::numeric_limits<Index>::max();
    for (Index y = 0; y < n; ++y) {
        if (!f[y]) continue;
        std::fill(dist.begin(), dist.end(), unreached);
        for (auto v : g.order) {
            if (f[v]) continue;
            for (auto u : g.in[v]) {
                Index len = unreached;
                if (u == y) len = 1;
                else if (!f[u] && dist[u] != unreached) len = dist[u] + 1;
                if (len != unreached && (dist[v] == unreached || len > dist[v])) {
                    dist[v] = len;
                    parent[v] = u;
                }
            }
        }
        for (Index x = 0; x < n; ++x) {
            if (!f[x]) continue;
            Index len = 0, via = unreached;
            for (auto u : g.in[x]) {
                if (!f[u] && dist[u] != unreached && dist[u] + 1 > len) {
                    len = dist[u] + 1;
                    via = u;
                }
            }
            if (via == unreached) continue;
            const Rational gap = *f[x] - *f[y];
            if (gap < 0) {
                throw Error(ErrorCode::Infeasible, "values fall from " + std::to_string(y) + " to " +
                                                       std::to_string(x) + " along an interior path");
            }
            const Rational slope = gap / static_cast<std::int64_t>(len);
            if (best && slope >= best->slope) continue;
            Candidate c{slope, y, x, {x}};
            for (Index v = via; v != y; v = parent[v]) c.path.push_back(v);
            c.path.push_back(y);
            std::reverse(c.path.begin(), c.path.end());
            best = std::move(c);
        }
    }
    return best;
}

IndexList assignedSet(const std::vector<std::optional<Rational>>& f) {
    IndexList out;
    for (Index v = 0; v < f.size(); ++v) {
        if (f[v]) out.push_back(v);
    }
    return out;
}

}  // namespace

ExponentSolution solveMinMax(const BoundaryProblem& p) {
    const auto g = checkedGraph(p);
    checkBoundary(p, g);

    std::vector<std::optional<Rational>> f(p.vertexCount);
    for (auto& [v, value] : p.boundary) f[v] = value;

    ExponentSolution sol;
    sol.stageSets.push_back(assignedSet(f));
    for (;;) {
        const auto pick = bestPath(g, f);
        if (!pick) break;
        if (!sol.deltas.empty() && pick->slope < sol.deltas.back()) {
            throw Error(ErrorCode::Internal, "path slope decreased between picks");
        }
        if (sol.deltas.empty() || pick->slope > sol.deltas.back()) {
            if (!sol.deltas.empty()) sol.stageSets.push_back(assignedSet(f));
            sol.deltas.push_back(pick->slope);
        }
        for (Index j = 1; j + 1 < pick->path.size(); ++j) {
            f[pick->path[j]] = *f[pick->from] + pick->slope * static_cast<std::int64_t>(j);
        }
    }
    if (std::any_of(f.begin(), f.end(), [](const auto& v) { return !v; })) {
        throw Error(ErrorCode::Internal, "some vertex lies on no boundary-to-boundary path");
    }
    if (!sol.deltas.empty()) sol.stageSets.push_back(assignedSet(f));
    for (auto& v : f) sol.values.push_back(*v);
    if (!verifySolution(p, sol.values)) {
        throw Error(ErrorCode::Internal, "constructed extension is not min-max averaging");
    }
    return sol;
}

bool verifySolution(const BoundaryProblem& p, const std::vector<Rational>& candidate) {
    if (candidate.size() != p.vertexCount) return false;
    for (auto& [v, value] : p.boundary) {
        if (candidate[v] != value) return false;
    }
    std::vector<std::optional<Rational>> lo(p.vertexCount), hi(p.vertexCount);
    for (auto [a, b] : p.edges) {
        if (candidate[a] > candidate[b]) return false;
        if (!hi[b] || candidate[a] > *hi[b]) hi[b] = candidate[a];
        if (!lo[a] || candidate[b] < *lo[a]) lo[a] = candidate[b];
    }
    for (Index v = 0; v < p.vertexCount; ++v) {
        if (p.isBoundary(v)) continue;
        if (!lo[v] || !hi[v]) return false;
        if (candidate[v] * 2 != *lo[v] + *hi[v]) return false;
    }
    return true;
}

namespace {

double averageOf(const Graph& g, const std::vector<double>& values, Index v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (auto w : g.out[v]) lo = std::min(lo, values[w]);
    for (auto w : g.in[v]) hi = std::max(hi, values[w]);
    return 0.5 * (lo + hi);
}

}  // namespace

FixedPointResult fixedPointOracle(const BoundaryProblem& p, int iterations, double tol) {
    const auto g = checkedGraph(p);
    checkBoundary(p, g);
    FixedPointResult r;
    r.values.assign(p.vertexCount, 0.0);
    for (auto& [v, value] : p.boundary) r.values[v] = toDouble(value);
    for (r.sweeps = 1; r.sweeps <= iterations; ++r.sweeps) {
        r.lastChange = 0.0;
        for (auto v : g.order) {
            if (p.isBoundary(v)) continue;
            const double next = averageOf(g, r.values, v);
            r.lastChange = std::max(r.lastChange, std::abs(next - r.values[v]));
            r.values[v] = next;
        }
        if (r.lastChange <= tol) {
            r.converged = true;
            break;
        }
    }
    r.sweeps = std::min(r.sweeps, iterations);
    return r;
}

Index longestPathLength(const BoundaryProblem& p) {
    const auto g = checkedGraph(p);
    std::vector<Index> depth(p.vertexCount, 0);
    for (auto v : g.order) {
        for (auto w : g.out[v]) depth[w] = std::max(depth[w], depth[v] + 1);
    }
    return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
}

StabilityResult stabilityCheck(const BoundaryProblem& p, const ExponentSolution& solved,
                               const std::vector<double>& d, double tol) {
    const auto g = checkedGraph(p);
    if (d.size() != p.vertexCount || solved.values.size() != p.vertexCount) {
        throw Error(ErrorCode::InvalidArgument, "perturbation and solution must cover every vertex");
    }
    std::vector<double> fhat(p.vertexCount);
    for (Index v = 0; v < p.vertexCount; ++v) fhat[v] = toDouble(solved.values[v]);

    StabilityResult r;
    r.gapDelta = std::numeric_limits<double>::infinity();
    for (Index x = 0; x < p.vertexCount; ++x) {
        if (p.isBoundary(x)) continue;
        for (const auto* side : {&g.in[x], &g.out[x]}) {
            for (auto u : *side) {
                for (auto v : *side) {
                    const auto gap = solved.values[u] - solved.values[v];
                    if (gap > 0) r.gapDelta = std::min(r.gapDelta, toDouble(gap));
                }
            }
        }
    }

    r.g = fhat;
    for (Index v = 0; v < p.vertexCount; ++v) {
        if (p.isBoundary(v)) r.g[v] = fhat[v] + d[v];
    }
    constexpr int budget = 100000;
    constexpr double damping = 0.5;
    double change = 0.0;
    int sweep = 0;
    for (; sweep < budget; ++sweep) {
        change = 0.0;
        for (auto v : g.order) {
            if (p.isBoundary(v)) continue;
            const double target = averageOf(g, r.g, v) + d[v];
            const double next = (1.0 - damping) * r.g[v] + damping * target;
            change = std::max(change, std::abs(next - r.g[v]));
            r.g[v] = next;
        }
        if (change <= tol) break;
    }
    if (sweep == budget) {
        throw Error(ErrorCode::NonConvergence, "perturbed system did not settle, last change " + std::to_string(change));
    }

    for (Index v = 0; v < p.vertexCount; ++v) {
        r.deviation = std::max(r.deviation, std::abs(r.g[v] - fhat[v]));
        r.perturbation = std::max(r.perturbation, std::abs(d[v]));
    }
    if (!(r.deviation < 0.5 * r.gapDelta)) {
        throw Error(ErrorCode::PreconditionViolated, "perturbed solution moved by " + std::to_string(r.deviation) +
                                                         ", half gap is " + std::to_string(0.5 * r.gapDelta));
    }
    r.longestPath = longestPathLength(p);
    const auto l = static_cast<double>(r.longestPath);
    r.bound2powL = std::pow(2.0, l) * r.perturbation;
    r.bound3powHalfL = std::pow(3.0, l / 2.0) * r.perturbation;
    // the iteration itself stops within tol of the fixed point
    r.withinBound = r.deviation <= r.bound2powL + 10.0 * tol;
    return r;
}

BoundaryProblem exponentProblem(const BlockRelation& rel) {
    BoundaryProblem p;
    p.vertexCount = rel.n + 2;
    p.edges = rel.extendedEdges;
    p.boundary[rel.source()] = Rational(-1);
    p.boundary[rel.sink()] = Rational(1);
    for (Index i = 0; i < rel.n; ++i) {
        if (rel.complement[i] == i) p.boundary[i] = Rational(0);
    }
    return p;
}

IndexExponents indexExponents(const BlockRelation& rel) {
    IndexExponents ex;
    ex.solution = solveMinMax(exponentProblem(rel));
    ex.f.assign(ex.solution.values.begin(), ex.solution.values.begin() + static_cast<std::ptrdiff_t>(rel.n));
    ex.sigma = *std::max_element(ex.f.begin(), ex.f.end());
    ex.Q = leastCommonDenominator(ex.f);

    const auto l = static_cast<std::int64_t>(longestChain(rel).length);
    if (ex.sigma != Rational(l, l + 2)) {
        throw Error(ErrorCode::Internal, "largest exponent differs from l/(l+2)");
    }
    if (*std::min_element(ex.f.begin(), ex.f.end()) != -ex.sigma) {
        throw Error(ErrorCode::Internal, "smallest exponent differs from -sigma");
    }
    for (Index i = 0; i < rel.n; ++i) {
        if (ex.f[i] != -ex.f[rel.complement[i]]) throw Error(ErrorCode::Internal, "exponents are not antisymmetric");
        if (ex.f[i] <= -1 || ex.f[i] >= 1) throw Error(ErrorCode::Internal, "exponent outside (-1, 1)");
    }
    return ex;
}

}  // namespace singdeg
