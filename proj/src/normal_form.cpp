#include "singdeg/normal_form.hpp"

#include "digraph.hpp"
#include "singdeg/error.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <optional>
#include <string>

namespace singdeg {

VarianceProfile::VarianceProfile(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw Error(ErrorCode::InvalidArgument, "variance profile must be a non-empty square matrix");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
            if (!(entries_(i, j) >= 0.0)) {
                throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(i + 1) + "," +
                                                          std::to_string(j + 1) + ") is negative");
            }
            if (entries_(i, j) != entries_(j, i)) {
                throw Error(ErrorCode::NotSymmetric, "entries (" + std::to_string(i + 1) + "," +
                                                         std::to_string(j + 1) + ") and its mirror differ");
            }
        }
    }
}

VarianceProfile VarianceProfile::fromPattern(const ZeroPattern& pattern) {
    Eigen::MatrixXd m(pattern.size(), pattern.size());
    for (Index i = 0; i < pattern.size(); ++i) {
        for (Index j = 0; j < pattern.size(); ++j) m(i, j) = pattern(i, j) ? 1.0 : 0.0;
    }
    return VarianceProfile(std::move(m));
}

ZeroPattern VarianceProfile::pattern() const {
    ZeroPattern p(size());
    for (Index i = 0; i < size(); ++i) {
        for (Index j = 0; j < size(); ++j) p.set(i, j, (*this)(i, j) != 0.0);
    }
    return p;
}

VarianceProfile VarianceProfile::permuted(const IndexList& order) const {
    Eigen::MatrixXd m(size(), size());
    for (Index a = 0; a < size(); ++a) {
        for (Index b = 0; b < size(); ++b) m(a, b) = (*this)(order[a], order[b]);
    }
    return VarianceProfile(std::move(m));
}

Index NormalForm::offset(Index block) const {
    return std::accumulate(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(block), Index{0});
}

IndexList NormalForm::members(Index block) const {
    const auto start = offset(block);
    return IndexList(perm.begin() + static_cast<std::ptrdiff_t>(start),
                     perm.begin() + static_cast<std::ptrdiff_t>(start + dims[block]));
}

namespace {

[[noreturn]] void violation(const std::string& what) {
    throw Error(ErrorCode::StructureViolation, what);
}

bool anyPresent(const ZeroPattern& p, const IndexList& rows, const IndexList& cols) {
    for (auto i : rows) {
        for (auto j : cols) {
            if (p(i, j)) return true;
        }
    }
    return false;
}

IndexList iota(Index n) {
    IndexList v(n);
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

// A unit is one future block: a middle FID component, or one half of a
// bipartite skeleton component.
struct Unit {
    IndexList members;
    std::optional<Index> partner;
};

struct Piece {
    IndexList plus;
    IndexList minus;  // empty for a middle component
    std::vector<unsigned char> key;
};

std::vector<unsigned char> patternKey(const ZeroPattern& p, Index dim) {
    std::vector<unsigned char> key;
    key.reserve(p.size() * p.size() + 1);
    key.push_back(static_cast<unsigned char>(std::min<Index>(dim, 255)));
    for (Index i = 0; i < p.size(); ++i) {
        for (Index j = 0; j < p.size(); ++j) key.push_back(p(i, j) ? 1 : 0);
    }
    return key;
}

bool pieceLess(const Piece& a, const Piece& b) {
    if (a.plus.size() != b.plus.size()) return a.plus.size() < b.plus.size();
    if (a.key != b.key) return a.key < b.key;
    return a.plus.front() < b.plus.front();
}

std::vector<IndexList> connectedComponents(const ZeroPattern& sym) {
    const Index k = sym.size();
    std::vector<bool> seen(k, false);
    std::vector<IndexList> comps;
    for (Index root = 0; root < k; ++root) {
        if (seen[root]) continue;
        IndexList comp;
        std::deque<Index> queue{root};
        seen[root] = true;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            comp.push_back(v);
            for (Index w = 0; w < k; ++w) {
                if (sym(v, w) && !seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

Piece splitComponent(const ZeroPattern& skeleton, const IndexList& comp) {
    const auto sub = skeleton.permuted(comp);
    if (isFID(sub)) {
        return {comp, {}, patternKey(sub, comp.size())};
    }
    // period-two component: breadth-first two-colouring from the lowest index
    std::vector<int> colour(comp.size(), -1);
    std::deque<Index> queue{0};
    colour[0] = 0;
    while (!queue.empty()) {
        const auto a = queue.front();
        queue.pop_front();
        for (Index b = 0; b < comp.size(); ++b) {
            if (!sub(a, b)) continue;
            if (colour[b] < 0) {
                colour[b] = 1 - colour[a];
                queue.push_back(b);
            } else if (colour[b] == colour[a]) {
                violation("skeleton component containing index " + std::to_string(comp.front() + 1) +
                          " is neither FID nor bipartite");
            }
        }
    }
    Piece piece;
    for (Index a = 0; a < comp.size(); ++a) {
        (colour[a] == 0 ? piece.plus : piece.minus).push_back(comp[a]);
    }
    if (piece.plus.size() != piece.minus.size()) {
        violation("bipartite skeleton component has unbalanced sides");
    }
    const auto tilde = skeleton.select(piece.plus, piece.minus);
    if (!isFID(tilde)) violation("off-diagonal skeleton block is not FID");
    piece.key = patternKey(tilde, piece.plus.size());
    return piece;
}

}  // namespace

NormalForm symmetricNormalForm(const VarianceProfile& profile) {
    const auto p = profile.pattern();
    const auto skeleton = fidSkeleton(p).skeleton;  // throws NoSupport

    std::vector<Piece> singles, pairs;
    for (const auto& comp : connectedComponents(skeleton)) {
        auto piece = splitComponent(skeleton, comp);
        (piece.minus.empty() ? singles : pairs).push_back(std::move(piece));
    }
    std::sort(singles.begin(), singles.end(), pieceLess);
    std::sort(pairs.begin(), pairs.end(), pieceLess);

    std::vector<Unit> units;
    for (const auto& pr : pairs) {
        const auto at = units.size();
        units.push_back({pr.plus, at + 1});
        units.push_back({pr.minus, at});
    }
    for (const auto& s : singles) units.push_back({s.plus, std::nullopt});

    const Index u = units.size();
    ZeroPattern unitMask(u);
    for (Index a = 0; a < u; ++a) {
        for (Index b = 0; b < u; ++b) unitMask.set(a, b, anyPresent(p, units[a].members, units[b].members));
    }

    // Peel off units whose row, restricted to the remaining units, has a single
    // non-zero entry (necessarily at its complement); pairs fill the outer bands
    // from the outside in, middle units fill the middle band in removal order.
    std::vector<bool> remaining(u, true);
    IndexList firstBand, middleBand, lastBandReversed;
    for (Index left = u; left > 0;) {
        std::optional<Index> pick;
        for (Index a = 0; a < u && !pick; ++a) {
            if (!remaining[a]) continue;
            Index nonzeros = 0;
            for (Index b = 0; b < u; ++b) {
                if (remaining[b] && unitMask(a, b)) ++nonzeros;
            }
            if (nonzeros == 1) pick = a;
        }
        if (!pick) violation("no block row with a single non-zero block; normal form does not exist");
        const Index a = *pick;
        if (!units[a].partner) {
            if (!unitMask(a, a)) violation("middle block is zero");
            middleBand.push_back(a);
            remaining[a] = false;
            --left;
        } else {
            const Index b = *units[a].partner;
            if (!remaining[b] || !unitMask(a, b)) violation("paired block lost its complement");
            firstBand.push_back(b);
            lastBandReversed.push_back(a);
            remaining[a] = remaining[b] = false;
            left -= 2;
        }
    }

    IndexList blockOrder = firstBand;
    blockOrder.insert(blockOrder.end(), middleBand.begin(), middleBand.end());
    blockOrder.insert(blockOrder.end(), lastBandReversed.rbegin(), lastBandReversed.rend());

    NormalForm nf;
    nf.M = firstBand.size();
    nf.L = middleBand.size();
    for (auto unit : blockOrder) {
        nf.dims.push_back(units[unit].members.size());
        nf.perm.insert(nf.perm.end(), units[unit].members.begin(), units[unit].members.end());
    }
    nf.permutedProfile = profile.permuted(nf.perm).entries();
    const Index n = nf.blockCount();
    nf.mask = ZeroPattern(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) nf.mask.set(i, j, anyPresent(p, nf.members(i), nf.members(j)));
    }
    auditNormalForm(profile, nf);
    return nf;
}

void auditNormalForm(const VarianceProfile& profile, const NormalForm& nf) {
    const Index k = profile.size();
    const Index n = nf.blockCount();
    if (nf.perm.size() != k) violation("permutation has wrong length");
    {
        auto sorted = nf.perm;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != iota(k)) violation("perm is not a permutation");
    }
    if (nf.dims.size() != n) violation("dims do not match L + 2M");
    if (std::accumulate(nf.dims.begin(), nf.dims.end(), Index{0}) != k) violation("dims do not sum to K");
    for (Index j = 0; j < nf.M; ++j) {
        if (nf.dims[j] != nf.dims[nf.complement(j)]) violation("paired blocks differ in size");
    }
    if (std::any_of(nf.dims.begin(), nf.dims.end(), [](Index d) { return d == 0; })) {
        violation("empty block");
    }

    const auto p = profile.pattern();
    std::vector<IndexList> members(n);
    for (Index i = 0; i < n; ++i) members[i] = nf.members(i);
    if (nf.mask.size() != n) violation("mask has wrong size");
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (nf.mask(i, j) != anyPresent(p, members[i], members[j])) violation("mask disagrees with S");
        }
    }
    if (!nf.mask.isSymmetric()) violation("mask is not symmetric");

    const auto band = [&](Index block) { return block < nf.M ? 1 : (block < nf.M + nf.L ? 2 : 3); };
    for (Index i = 0; i < n; ++i) {
        if (!nf.mask(i, nf.complement(i))) violation("block " + std::to_string(i + 1) + " has a zero complement block");
        for (Index j = 0; j < n; ++j) {
            if (!nf.mask(i, j)) continue;
            const int bi = band(i), bj = band(j);
            const bool zeroBand = (bi == 2 && bj == 3) || (bi == 3 && bj == 2) || (bi == 3 && bj == 3) ||
                                  (bi == 2 && bj == 2 && i != j);
            // outer bands vanish strictly beyond the inverse block diagonal
            const bool belowInverse = ((bi == 1 && bj == 3) || (bi == 3 && bj == 1)) && j > nf.complement(i);
            if (zeroBand || belowInverse) {
                violation("block (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") must vanish");
            }
        }
        if (!isFID(p.select(members[i], members[nf.complement(i)]))) {
            violation("block (" + std::to_string(i + 1) + "," + std::to_string(nf.complement(i) + 1) + ") is not FID");
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

/// Rectangular bipartite graph rows -> cols, used for the Hall-surplus test.
struct Bipartite {
    std::vector<IndexList> adj;
    Index cols = 0;

    /// Rows reachable from unmatched rows by alternating paths, or empty if
    /// every row is matched.
    [[nodiscard]] IndexList hallViolator() const {
        const Index rows = adj.size();
        std::vector<std::optional<Index>> rowMatch(rows), owner(cols);
        std::vector<bool> seen(cols);
        const auto augment = [&](auto&& self, Index r) -> bool {
            for (auto c : adj[r]) {
                if (seen[c]) continue;
                seen[c] = true;
                if (!owner[c] || self(self, *owner[c])) {
                    rowMatch[r] = c;
                    owner[c] = r;
                    return true;
                }
            }
            return false;
        };
        for (Index r = 0; r < rows; ++r) {
            std::fill(seen.begin(), seen.end(), false);
            augment(augment, r);
        }
        std::vector<bool> rowSeen(rows, false), colSeen(cols, false);
        std::vector<Index> stack;
        for (Index r = 0; r < rows; ++r) {
            if (!rowMatch[r]) {
                rowSeen[r] = true;
                stack.push_back(r);
            }
        }
        while (!stack.empty()) {
            const auto r = stack.back();
            stack.pop_back();
            for (auto c : adj[r]) {
                if (colSeen[c]) continue;
                colSeen[c] = true;
                const auto next = *owner[c];
                if (!rowSeen[next]) {
                    rowSeen[next] = true;
                    stack.push_back(next);
                }
            }
        }
        IndexList out;
        for (Index r = 0; r < rows; ++r) {
            if (rowSeen[r]) out.push_back(r);
        }
        return out;
    }
};

/// Some non-empty set X of `rows` whose neighbourhood inside `cols` has at
/// most |X| elements, or empty if every such set has strictly more neighbours.
IndexList spreadingViolator(const ZeroPattern& p, const IndexList& rows, const IndexList& cols) {
    for (Index doubled = 0; doubled < rows.size(); ++doubled) {
        Bipartite g;
        g.cols = cols.size();
        for (Index r = 0; r <= rows.size(); ++r) {
            const Index row = r < rows.size() ? rows[r] : rows[doubled];
            IndexList nb;
            for (Index c = 0; c < cols.size(); ++c) {
                if (p(row, cols[c])) nb.push_back(c);
            }
            g.adj.push_back(std::move(nb));
        }
        const auto z = g.hallViolator();
        if (z.empty()) continue;
        IndexList set;
        for (auto r : z) set.push_back(r < rows.size() ? rows[r] : rows[doubled]);
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        return set;
    }
    return {};
}

IndexList complementOf(const IndexList& sorted, Index k) {
    IndexList out;
    for (Index i = 0; i < k; ++i) {
        if (!std::binary_search(sorted.begin(), sorted.end(), i)) out.push_back(i);
    }
    return out;
}

}  // namespace

Eigen::MatrixXd NoSupportForm::block(Index row, Index col) const {
    const auto start = [&](Index b) {
        return static_cast<Eigen::Index>(std::accumulate(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(b), Index{0}));
    };
    return permutedProfile.block(start(row), start(col), static_cast<Eigen::Index>(sizes[row]),
                                 static_cast<Eigen::Index>(sizes[col]));
}

NoSupportForm noSupportNormalForm(const VarianceProfile& profile) {
    const auto p = profile.pattern();
    const auto sc = maximalZeroSubmatrix(p);  // throws ZeroRow
    if (sc.tag != SupportTag::NoSupport) {
        throw Error(ErrorCode::HasSupport, "profile has a positive diagonal");
    }
    const Index k = p.size();

    // symmetrise the witness: rows I cap J against columns I cup J keeps the perimeter
    IndexList rowsI, colsJ;
    std::set_intersection(sc.witnessI.begin(), sc.witnessI.end(), sc.witnessJ.begin(), sc.witnessJ.end(),
                          std::back_inserter(rowsI));
    std::set_union(sc.witnessI.begin(), sc.witnessI.end(), sc.witnessJ.begin(), sc.witnessJ.end(),
                   std::back_inserter(colsJ));
    const Index perimeter = rowsI.size() + colsJ.size();

    // raise |J| while some rows outside J crowd into too few columns of I
    for (;;) {
        const auto outside = complementOf(colsJ, k);
        const auto crowded = spreadingViolator(p, outside, rowsI);
        if (crowded.empty()) break;
        IndexList reached;
        for (auto c : rowsI) {
            if (anyPresent(p, crowded, {c})) reached.push_back(c);
        }
        IndexList newRows;
        std::set_difference(rowsI.begin(), rowsI.end(), reached.begin(), reached.end(), std::back_inserter(newRows));
        IndexList newCols;
        std::set_union(colsJ.begin(), colsJ.end(), crowded.begin(), crowded.end(), std::back_inserter(newCols));
        rowsI = std::move(newRows);
        colsJ = std::move(newCols);
        if (rowsI.size() + colsJ.size() != perimeter) {
            throw Error(ErrorCode::Internal, "zero block perimeter changed while raising its height");
        }
    }

    NoSupportForm form;
    form.zeroRows = rowsI;
    form.zeroColumns = colsJ;
    form.kappa = *sc.kappa;
    form.perm = complementOf(colsJ, k);
    std::set_difference(colsJ.begin(), colsJ.end(), rowsI.begin(), rowsI.end(), std::back_inserter(form.perm));
    form.perm.insert(form.perm.end(), rowsI.begin(), rowsI.end());
    form.sizes = {k - colsJ.size(), colsJ.size() - rowsI.size(), rowsI.size()};
    form.permutedProfile = profile.permuted(form.perm).entries();
    auditNoSupportForm(profile, form);
    return form;
}

void auditNoSupportForm(const VarianceProfile& profile, const NoSupportForm& form) {
    const Index k = profile.size();
    if (form.sizes[0] + form.sizes[1] + form.sizes[2] != k) violation("block sizes do not sum to K");
    for (auto [r, c] : {std::pair{1, 2}, {2, 1}, {2, 2}}) {
        if ((form.block(r, c).array() != 0.0).any()) {
            violation("block (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ") must vanish");
        }
    }
    if (form.sizes[1] > 0) {
        const Eigen::MatrixXd s22 = form.block(1, 1);
        if (!hasSupport(VarianceProfile(s22).pattern())) violation("middle block has no support");
    }
    const auto pp = VarianceProfile(form.permutedProfile).pattern();
    IndexList first(form.sizes[0]), third(form.sizes[2]);
    std::iota(first.begin(), first.end(), Index{0});
    std::iota(third.begin(), third.end(), form.sizes[0] + form.sizes[1]);
    if (!first.empty() && !spreadingViolator(pp, first, third).empty()) {
        violation("rows of the (1,3) block are not spread over enough columns");
    }
    const auto perimeter = static_cast<std::int64_t>(form.sizes[2] + form.sizes[1] + form.sizes[2]);
    if (Rational(perimeter - static_cast<std::int64_t>(k), static_cast<std::int64_t>(k)) != form.kappa) {
        violation("atom mass disagrees with the zero block");
    }
}

// ---------------------------------------------------------------------------

bool BlockRelation::precedes(Index i, Index j) const {
    return std::binary_search(edges.begin(), edges.end(), std::pair{i, j});
}

std::vector<Index> BlockRelation::successors(Index i) const {
    std::vector<Index> out;
    for (auto [a, b] : edges) {
        if (a == i) out.push_back(b);
    }
    return out;
}

std::vector<Index> BlockRelation::predecessors(Index i) const {
    std::vector<Index> out;
    for (auto [a, b] : edges) {
        if (b == i) out.push_back(a);
    }
    return out;
}

BlockRelation buildRelation(const NormalForm& nf) {
    BlockRelation rel;
    rel.n = nf.blockCount();
    for (Index i = 0; i < rel.n; ++i) rel.complement.push_back(nf.complement(i));
    for (Index i = 0; i < rel.n; ++i) {
        for (Index j = 0; j < rel.n; ++j) {
            if (i != j && nf.mask(i, rel.complement[j])) rel.edges.emplace_back(i, j);
        }
    }
    for (auto [i, j] : rel.edges) {
        if (!rel.precedes(rel.complement[j], rel.complement[i])) {
            throw Error(ErrorCode::Internal, "relation is not mirror symmetric");
        }
    }
    detail::Adjacency out(rel.n);
    for (auto [i, j] : rel.edges) out[i].push_back(j);
    if (!detail::topologicalOrder(out)) {
        throw Error(ErrorCode::CyclicRelation, "block relation contains a cycle");
    }
    rel.extendedEdges = rel.edges;
    for (Index i = 0; i < rel.n; ++i) {
        if (rel.predecessors(i).empty()) rel.extendedEdges.emplace_back(rel.source(), i);
        if (rel.successors(i).empty()) rel.extendedEdges.emplace_back(i, rel.sink());
    }
    std::sort(rel.extendedEdges.begin(), rel.extendedEdges.end());
    return rel;
}

Chain longestChain(const BlockRelation& rel) {
    detail::Adjacency out(rel.n);
    for (auto [i, j] : rel.edges) out[i].push_back(j);
    const auto order = detail::topologicalOrder(out);
    if (!order) throw Error(ErrorCode::CyclicRelation, "block relation contains a cycle");

    // tail[v]: edges in the longest chain starting at v
    std::vector<Index> tail(rel.n, 0);
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        for (auto w : out[*it]) tail[*it] = std::max(tail[*it], tail[w] + 1);
    }
    Chain chain;
    if (rel.n == 0) return chain;
    chain.length = *std::max_element(tail.begin(), tail.end());
    Index v = static_cast<Index>(std::find(tail.begin(), tail.end(), chain.length) - tail.begin());
    chain.witness.push_back(v);
    while (tail[v] > 0) {
        Index next = rel.n;
        for (auto w : out[v]) {
            if (tail[w] + 1 == tail[v]) next = std::min(next, w);
        }
        v = next;
        chain.witness.push_back(v);
    }
    return chain;
}

}  // namespace singdeg
