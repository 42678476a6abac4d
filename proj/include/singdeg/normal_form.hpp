#pragma once

// Symmetric normal form of a variance profile, its 0-1 block mask, the block
// relation and the longest increasing chain; plus the 3x3 decomposition used
// when the profile has no support.

#include "singdeg/pattern.hpp"
#include "singdeg/rational.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace singdeg {

/// K x K symmetric non-negative matrix of block variances.
class VarianceProfile {
public:
    VarianceProfile() = default;
    /// Throws NotSymmetric (exact comparison) or NegativeEntry.
    explicit VarianceProfile(Eigen::MatrixXd entries);

    static VarianceProfile fromPattern(const ZeroPattern& pattern);

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(entries_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    [[nodiscard]] double operator()(Index i, Index j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    /// Exact-zero thresholding, no tolerance.
    [[nodiscard]] ZeroPattern pattern() const;
    [[nodiscard]] VarianceProfile permuted(const IndexList& order) const;

private:
    Eigen::MatrixXd entries_;
};

struct NormalForm {
    /// perm[a] is the original index placed at position a, i.e.
    /// permutedProfile(a, b) = S(perm[a], perm[b]).
    IndexList perm;
    std::vector<Index> dims;  ///< k_1, ..., k_{L+2M}
    Index L = 0;
    Index M = 0;
    ZeroPattern mask;          ///< (L+2M) x (L+2M) block indicator of the full profile
    Eigen::MatrixXd permutedProfile;

    [[nodiscard]] Index blockCount() const noexcept { return L + 2 * M; }
    /// Complement block (0-based): mirrored across the anti-diagonal band, or itself in the middle band.
    [[nodiscard]] Index complement(Index block) const noexcept {
        return isMiddle(block) ? block : blockCount() - 1 - block;
    }
    [[nodiscard]] bool isMiddle(Index block) const noexcept { return block >= M && block < M + L; }
    [[nodiscard]] Index offset(Index block) const;
    /// Original indices belonging to a block.
    [[nodiscard]] IndexList members(Index block) const;
};

struct BlockRelation {
    Index n = 0;
    std::vector<Index> complement;
    /// (i, j) with i before j, 0-based block indices, sorted.
    std::vector<std::pair<Index, Index>> edges;
    /// edges plus (source, i) for blocks without predecessor and (i, sink)
    /// for blocks without successor, with source = n and sink = n + 1.
    std::vector<std::pair<Index, Index>> extendedEdges;

    [[nodiscard]] Index source() const noexcept { return n; }
    [[nodiscard]] Index sink() const noexcept { return n + 1; }
    [[nodiscard]] bool precedes(Index i, Index j) const;
    [[nodiscard]] std::vector<Index> successors(Index i) const;
    [[nodiscard]] std::vector<Index> predecessors(Index i) const;
};

struct Chain {
    Index length = 0;   ///< number of edges
    IndexList witness;  ///< lexicographically smallest longest chain (0-based blocks)
};

/// Block decomposition of a profile without support:
///   [ S11 S12 S13 ]
///   [ S21 S22  0  ]
///   [ S31  0   0  ]
/// with sizes (K-|J|, |J|-|I|, |I|); rows I = third band, columns J = second and third bands.
struct NoSupportForm {
    IndexList perm;
    std::array<Index, 3> sizes{};
    Eigen::MatrixXd permutedProfile;
    IndexList zeroRows;     ///< I (original indices)
    IndexList zeroColumns;  ///< J (original indices), I is a subset of J
    Rational kappa;

    [[nodiscard]] Eigen::MatrixXd block(Index row, Index col) const;
};

/// Throws NotSymmetric, NegativeEntry, NoSupport or StructureViolation.
NormalForm symmetricNormalForm(const VarianceProfile& profile);

/// Independent re-check of every structural claim of a normal form; throws StructureViolation.
void auditNormalForm(const VarianceProfile& profile, const NormalForm& nf);

/// Throws HasSupport, ZeroRow or StructureViolation.
NoSupportForm noSupportNormalForm(const VarianceProfile& profile);

void auditNoSupportForm(const VarianceProfile& profile, const NoSupportForm& form);

/// Throws CyclicRelation if the relation on the blocks is not acyclic.
BlockRelation buildRelation(const NormalForm& nf);

Chain longestChain(const BlockRelation& rel);

}  // namespace singdeg
