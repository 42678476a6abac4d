#pragma once

// Boundary-value min-max averaging on finite DAGs: exact constructive solver,
// verifier, floating-point cross-check, perturbation stability, and the
// block exponents f_i built from a block relation.

#include "singdeg/normal_form.hpp"
#include "singdeg/rational.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace singdeg {

struct BoundaryProblem {
    Index vertexCount = 0;
    std::vector<std::pair<Index, Index>> edges;  ///< (x, y) means x before y
    std::map<Index, Rational> boundary;          ///< boundary set with its values

    [[nodiscard]] bool isBoundary(Index v) const { return boundary.contains(v); }
};

struct ExponentSolution {
    std::vector<Rational> values;
    std::vector<Rational> deltas;        ///< distinct path slopes, strictly increasing
    std::vector<IndexList> stageSets;    ///< Y_0 subset Y_1 subset ... (sorted), last is everything
};

/// Throws NotDAG, BadBoundary, Infeasible; Internal if self-certification fails.
ExponentSolution solveMinMax(const BoundaryProblem& p);

/// Exact check: boundary match, non-decreasing along edges, averaging identity inside.
bool verifySolution(const BoundaryProblem& p, const std::vector<Rational>& candidate);

struct FixedPointResult {
    std::vector<double> values;
    double lastChange = 0.0;
    int sweeps = 0;
    bool converged = false;
};

/// Gauss-Seidel sweeps of g <- (min successor + max predecessor)/2 in
/// topological order, interior started at 0.
FixedPointResult fixedPointOracle(const BoundaryProblem& p, int iterations = 100000, double tol = 1e-13);

struct StabilityResult {
    std::vector<double> g;
    double deviation = 0.0;      ///< sup |g - f|
    double perturbation = 0.0;   ///< sup |d|
    Index longestPath = 0;
    double bound2powL = 0.0;     ///< 2^l * sup |d|
    double bound3powHalfL = 0.0; ///< 3^(l/2) * sup |d|
    double gapDelta = 0.0;       ///< smallest non-zero sibling gap (infinity if none)
    bool withinBound = false;
};

/// Solves the perturbed system by damped Gauss-Seidel and compares against the
/// exact solution. Throws PreconditionViolated when the perturbed solution
/// leaves the half-gap neighbourhood, NonConvergence if the solve stalls.
StabilityResult stabilityCheck(const BoundaryProblem& p, const ExponentSolution& solved,
                               const std::vector<double>& d, double tol = 1e-14);

/// Number of edges of the longest path in the graph.
Index longestPathLength(const BoundaryProblem& p);

struct IndexExponents {
    std::vector<Rational> f;
    Rational sigma;
    std::int64_t Q = 1;
    ExponentSolution solution;  ///< over blocks plus source (n) and sink (n + 1)
};

BoundaryProblem exponentProblem(const BlockRelation& rel);
IndexExponents indexExponents(const BlockRelation& rel);

}  // namespace singdeg
