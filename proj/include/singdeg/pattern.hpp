#pragma once

// Combinatorics of zero patterns of non-negative square matrices: matchings,
// support classes, full indecomposability and the FID skeleton.

#include "singdeg/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace singdeg {

using Index = std::size_t;
using IndexList = std::vector<Index>;

/// K x K boolean grid; entry (i, j) is true iff the matrix entry is non-zero.
class ZeroPattern {
public:
    ZeroPattern() = default;
    explicit ZeroPattern(Index dim) : dim_(dim), cells_(dim * dim, 0) {}

    /// Rows of 0/1 (any non-zero int counts as present).
    static ZeroPattern fromRows(const std::vector<std::vector<int>>& rows);
    static ZeroPattern allOnes(Index dim);

    [[nodiscard]] Index size() const noexcept { return dim_; }
    [[nodiscard]] bool operator()(Index i, Index j) const { return cells_[i * dim_ + j] != 0; }
    void set(Index i, Index j, bool present = true) { cells_[i * dim_ + j] = present ? 1 : 0; }

    /// result(a, b) = (*this)(rows[a], cols[b]); rows and cols must have equal length.
    [[nodiscard]] ZeroPattern select(const IndexList& rows, const IndexList& cols) const;
    /// Symmetric relabelling: result(a, b) = (*this)(order[a], order[b]).
    [[nodiscard]] ZeroPattern permuted(const IndexList& order) const { return select(order, order); }
    [[nodiscard]] ZeroPattern transposed() const;

    [[nodiscard]] bool isSymmetric() const;
    [[nodiscard]] std::optional<Index> firstZeroRow() const;
    [[nodiscard]] std::size_t count() const;

    friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;

private:
    Index dim_ = 0;
    std::vector<unsigned char> cells_;
};

struct MatchingResult {
    std::size_t size = 0;
    std::vector<std::optional<Index>> rowMatch;  ///< column matched to each row
    bool perfect = false;
};

enum class SupportTag { TotalSupport, SupportOnly, NoSupport };

struct SupportClass {
    SupportTag tag = SupportTag::TotalSupport;
    // Only populated for NoSupport: rows witnessI x columns witnessJ is an
    // all-zero submatrix of maximal perimeter and kappa = (|I|+|J|-K)/K.
    IndexList witnessI;
    IndexList witnessJ;
    std::optional<Rational> kappa;
};

struct SkeletonResult {
    /// Present entries that lie on some positive diagonal (the FID skeleton).
    ZeroPattern skeleton;
    /// Present entries dropped because no positive diagonal passes through them.
    std::vector<std::pair<Index, Index>> removed;
};

/// Maximum-cardinality matching of rows to columns along present entries
/// (augmenting paths, rows scanned in increasing order, columns ascending).
MatchingResult maxBipartiteMatching(const ZeroPattern& p);

bool hasSupport(const ZeroPattern& p);
bool hasTotalSupport(const ZeroPattern& p);
bool isFID(const ZeroPattern& p);

/// Throws Error(NoSupport) if p has no positive diagonal.
SkeletonResult fidSkeleton(const ZeroPattern& p);

/// Support class of p; for NoSupport also a maximal-perimeter zero submatrix
/// (canonical Koenig witness: I = rows reachable from unmatched rows by
/// alternating paths, J = columns not reachable). Witnesses are not unique,
/// kappa is. Throws Error(ZeroRow) if p has an identically zero row.
SupportClass maximalZeroSubmatrix(const ZeroPattern& p);

const char* name(SupportTag tag);

// ---------------------------------------------------------------------------
// Exhaustive reference answers for small patterns (K <= 8).

enum class PatternQuery { Support, TotalSupport, FID, Skeleton, MaxZero };

struct OracleAnswer {
    std::optional<bool> flag;              ///< Support, TotalSupport, FID
    std::optional<ZeroPattern> skeleton;   ///< Skeleton (empty if no support)
    std::optional<SupportClass> zeroBlock; ///< MaxZero
};

inline constexpr Index kOracleMaxDim = 8;

/// Answers by enumeration of permutations and index subsets; throws Error(TooLarge) for K > 8.
OracleAnswer bruteForceOracle(const ZeroPattern& p, PatternQuery query);

}  // namespace singdeg
