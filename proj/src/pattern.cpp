#include "singdeg/pattern.hpp"

#include "digraph.hpp"
#include "singdeg/error.hpp"

#include <algorithm>
#include <numeric>

namespace singdeg {

ZeroPattern ZeroPattern::fromRows(const std::vector<std::vector<int>>& rows) {
    ZeroPattern p(rows.size());
    for (Index i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) {
            throw Error(ErrorCode::InvalidArgument, "pattern rows must form a square grid");
        }
        for (Index j = 0; j < rows.size(); ++j) p.set(i, j, rows[i][j] != 0);
    }
    return p;
}

ZeroPattern ZeroPattern::allOnes(Index dim) {
    ZeroPattern p(dim);
    std::fill(p.cells_.begin(), p.cells_.end(), 1);
    return p;
}

ZeroPattern ZeroPattern::select(const IndexList& rows, const IndexList& cols) const {
    if (rows.size() != cols.size()) {
        throw Error(ErrorCode::InvalidArgument, "select needs as many rows as columns");
    }
    ZeroPattern out(rows.size());
    for (Index a = 0; a < rows.size(); ++a) {
        for (Index b = 0; b < cols.size(); ++b) out.set(a, b, (*this)(rows[a], cols[b]));
    }
    return out;
}

ZeroPattern ZeroPattern::transposed() const {
    ZeroPattern out(dim_);
    for (Index i = 0; i < dim_; ++i) {
        for (Index j = 0; j < dim_; ++j) out.set(j, i, (*this)(i, j));
    }
    return out;
}

bool ZeroPattern::isSymmetric() const { return *this == transposed(); }

std::optional<Index> ZeroPattern::firstZeroRow() const {
    for (Index i = 0; i < dim_; ++i) {
        bool any = false;
        for (Index j = 0; j < dim_ && !any; ++j) any = (*this)(i, j);
        if (!any) return i;
    }
    return std::nullopt;
}

std::size_t ZeroPattern::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

namespace {

struct Matcher {
    const ZeroPattern& p;
    std::vector<std::optional<Index>> rowMatch;
    std::vector<std::optional<Index>> colOwner;
    std::vector<bool> seen;

    explicit Matcher(const ZeroPattern& pattern)
        : p(pattern), rowMatch(pattern.size()), colOwner(pattern.size()), seen(pattern.size()) {}

    bool augment(Index row) {
        for (Index col = 0; col < p.size(); ++col) {
            if (!p(row, col) || seen[col]) continue;
            seen[col] = true;
            if (!colOwner[col] || augment(*colOwner[col])) {
                rowMatch[row] = col;
                colOwner[col] = row;
                return true;
            }
        }
        return false;
    }
};

// Row graph of alternating cycles: i -> owner(j) for every present (i, j)
// off the fixed perfect matching.
detail::Adjacency alternatingGraph(const ZeroPattern& p, const MatchingResult& m) {
    const Index k = p.size();
    std::vector<Index> owner(k);
    for (Index i = 0; i < k; ++i) owner[*m.rowMatch[i]] = i;
    detail::Adjacency out(k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            if (p(i, j) && j != *m.rowMatch[i]) out[i].push_back(owner[j]);
        }
    }
    return out;
}

}  // namespace

MatchingResult maxBipartiteMatching(const ZeroPattern& p) {
    Matcher matcher(p);
    std::size_t size = 0;
    for (Index row = 0; row < p.size(); ++row) {
        std::fill(matcher.seen.begin(), matcher.seen.end(), false);
        if (matcher.augment(row)) ++size;
    }
    return {size, std::move(matcher.rowMatch), size == p.size()};
}

bool hasSupport(const ZeroPattern& p) { return maxBipartiteMatching(p).perfect; }

bool hasTotalSupport(const ZeroPattern& p) {
    if (!hasSupport(p)) return false;
    return fidSkeleton(p).skeleton == p;
}

bool isFID(const ZeroPattern& p) {
    const auto m = maxBipartiteMatching(p);
    if (!m.perfect) return false;
    const auto comp = detail::stronglyConnectedComponents(alternatingGraph(p, m));
    return std::all_of(comp.begin(), comp.end(), [&](Index c) { return c == comp.front(); });
}

SkeletonResult fidSkeleton(const ZeroPattern& p) {
    const auto m = maxBipartiteMatching(p);
    if (!m.perfect) {
        throw Error(ErrorCode::NoSupport, "FID skeleton needs a positive diagonal");
    }
    const Index k = p.size();
    std::vector<Index> owner(k);
    for (Index i = 0; i < k; ++i) owner[*m.rowMatch[i]] = i;
    const auto comp = detail::stronglyConnectedComponents(alternatingGraph(p, m));

    SkeletonResult result{ZeroPattern(k), {}};
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            if (!p(i, j)) continue;
            if (j == *m.rowMatch[i] || comp[i] == comp[owner[j]]) {
                result.skeleton.set(i, j);
            } else {
                result.removed.emplace_back(i, j);
            }
        }
    }
    return result;
}

SupportClass maximalZeroSubmatrix(const ZeroPattern& p) {
    if (const auto row = p.firstZeroRow()) {
        throw Error(ErrorCode::ZeroRow, "row " + std::to_string(*row + 1) + " is identically zero");
    }
    const auto m = maxBipartiteMatching(p);
    if (m.perfect) {
        SupportClass sc;
        sc.tag = fidSkeleton(p).skeleton == p ? SupportTag::TotalSupport : SupportTag::SupportOnly;
        return sc;
    }

    const Index k = p.size();
    std::vector<std::optional<Index>> owner(k);
    for (Index i = 0; i < k; ++i) {
        if (m.rowMatch[i]) owner[*m.rowMatch[i]] = i;
    }
    std::vector<bool> rowSeen(k, false), colSeen(k, false);
    std::vector<Index> frontier;
    for (Index i = 0; i < k; ++i) {
        if (!m.rowMatch[i]) {
            rowSeen[i] = true;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const Index row = frontier.back();
        frontier.pop_back();
        for (Index col = 0; col < k; ++col) {
            if (!p(row, col) || colSeen[col]) continue;
            colSeen[col] = true;
            // every reachable column is matched, otherwise the matching was not maximum
            const Index next = *owner[col];
            if (!rowSeen[next]) {
                rowSeen[next] = true;
                frontier.push_back(next);
            }
        }
    }

    SupportClass sc;
    sc.tag = SupportTag::NoSupport;
    for (Index i = 0; i < k; ++i) {
        if (rowSeen[i]) sc.witnessI.push_back(i);
        if (!colSeen[i]) sc.witnessJ.push_back(i);
    }
    const auto perimeter = static_cast<std::int64_t>(sc.witnessI.size() + sc.witnessJ.size());
    if (perimeter != static_cast<std::int64_t>(2 * k - m.size)) {
        throw Error(ErrorCode::Internal, "Koenig witness does not match the matching number");
    }
    for (auto i : sc.witnessI) {
        for (auto j : sc.witnessJ) {
            if (p(i, j)) throw Error(ErrorCode::Internal, "Koenig witness is not a zero submatrix");
        }
    }
    sc.kappa = Rational(perimeter - static_cast<std::int64_t>(k), static_cast<std::int64_t>(k));
    return sc;
}

const char* name(SupportTag tag) {
    switch (tag) {
        case SupportTag::TotalSupport: return "TotalSupport";
        case SupportTag::SupportOnly: return "SupportOnly";
        case SupportTag::NoSupport: return "NoSupport";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------

namespace {

/// Visits every permutation with an all-present diagonal.
template <typename Visit>
void forEachPositiveDiagonal(const ZeroPattern& p, Visit&& visit) {
    IndexList perm(p.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    do {
        bool positive = true;
        for (Index i = 0; i < p.size() && positive; ++i) positive = p(i, perm[i]);
        if (positive) visit(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

ZeroPattern unionOfPositiveDiagonals(const ZeroPattern& p, bool& any) {
    ZeroPattern acc(p.size());
    any = false;
    forEachPositiveDiagonal(p, [&](const IndexList& perm) {
        any = true;
        for (Index i = 0; i < p.size(); ++i) acc.set(i, perm[i]);
    });
    return acc;
}

/// Largest column set J with p(I, J) == 0 for the row subset encoded in mask.
IndexList zeroColumns(const ZeroPattern& p, unsigned mask) {
    IndexList cols;
    for (Index j = 0; j < p.size(); ++j) {
        bool zero = true;
        for (Index i = 0; i < p.size() && zero; ++i) {
            if ((mask >> i) & 1U) zero = !p(i, j);
        }
        if (zero) cols.push_back(j);
    }
    return cols;
}

}  // namespace

OracleAnswer bruteForceOracle(const ZeroPattern& p, PatternQuery query) {
    const Index k = p.size();
    if (k > kOracleMaxDim) {
        throw Error(ErrorCode::TooLarge, "exhaustive oracle is limited to K <= 8");
    }
    OracleAnswer answer;
    bool any = false;
    switch (query) {
        case PatternQuery::Support:
            unionOfPositiveDiagonals(p, any);
            answer.flag = any;
            break;
        case PatternQuery::TotalSupport: {
            const auto acc = unionOfPositiveDiagonals(p, any);
            answer.flag = any && acc == p;
            break;
        }
        case PatternQuery::Skeleton: {
            const auto acc = unionOfPositiveDiagonals(p, any);
            if (any) answer.skeleton = acc;
            break;
        }
        case PatternQuery::FID: {
            // no zero submatrix with non-empty I, J and |I| + |J| >= K
            bool fid = true;
            for (unsigned mask = 1; mask < (1U << k) && fid; ++mask) {
                const auto cols = zeroColumns(p, mask);
                const auto rows = static_cast<Index>(__builtin_popcount(mask));
                if (!cols.empty() && rows + cols.size() >= k) fid = false;
            }
            answer.flag = fid;
            break;
        }
        case PatternQuery::MaxZero: {
            SupportClass sc;
            const auto acc = unionOfPositiveDiagonals(p, any);
            if (any) {
                sc.tag = acc == p ? SupportTag::TotalSupport : SupportTag::SupportOnly;
            } else {
                sc.tag = SupportTag::NoSupport;
                Index best = 0;
                for (unsigned mask = 0; mask < (1U << k); ++mask) {
                    auto cols = zeroColumns(p, mask);
                    const auto rows = static_cast<Index>(__builtin_popcount(mask));
                    if (rows + cols.size() > best) {
                        best = rows + cols.size();
                        sc.witnessI.clear();
                        for (Index i = 0; i < k; ++i) {
                            if ((mask >> i) & 1U) sc.witnessI.push_back(i);
                        }
                        sc.witnessJ = std::move(cols);
                    }
                }
                sc.kappa = Rational(static_cast<std::int64_t>(best) - static_cast<std::int64_t>(k),
                                    static_cast<std::int64_t>(k));
            }
            answer.zeroBlock = sc;
            break;
        }
    }
    return answer;
}

}  // namespace singdeg
