#pragma once

#include "singdeg/normal_form.hpp"
#include "singdeg/pattern.hpp"

#include <random>
#include <vector>

namespace fixtures {

inline singdeg::ZeroPattern tenPattern() {
    return singdeg::ZeroPattern::fromRows({
        {0, 0, 0, 1, 1, 0, 0, 0, 0, 1},
        {0, 0, 1, 1, 0, 0, 0, 1, 1, 1},
        {0, 1, 0, 1, 0, 0, 0, 0, 0, 0},
        {1, 1, 1, 1, 0, 0, 0, 1, 0, 0},
        {1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 1, 0, 1, 0},
        {0, 1, 0, 1, 0, 0, 0, 0, 0, 1},
        {0, 1, 0, 0, 0, 0, 1, 0, 1, 0},
        {1, 1, 0, 0, 1, 1, 0, 1, 0, 0},
    });
}

/// Block mask of the ten-by-ten pattern in the arrangement
/// 10 | 2 4 | 1 | 7 9 | 5 | 3 8 | 6.
inline singdeg::ZeroPattern tenMask() {
    return singdeg::ZeroPattern::fromRows({
        {0, 1, 1, 0, 1, 1, 1},
        {1, 1, 1, 1, 0, 1, 0},
        {1, 1, 0, 0, 1, 0, 0},
        {0, 1, 0, 1, 0, 0, 0},
        {1, 0, 1, 0, 0, 0, 0},
        {1, 1, 0, 0, 0, 0, 0},
        {1, 0, 0, 0, 0, 0, 0},
    });
}

/// s_ij = 1 if i + j <= K + 1 (1-based), else 0.
inline singdeg::ZeroPattern upperAntiTriangle(singdeg::Index k) {
    singdeg::ZeroPattern p(k);
    for (singdeg::Index i = 0; i < k; ++i) {
        for (singdeg::Index j = 0; j + i + 1 < k + 1; ++j) p.set(i, j);
    }
    return p;
}

inline singdeg::ZeroPattern noSupportExample() {
    return singdeg::ZeroPattern::fromRows({{0, 0, 1}, {0, 0, 1}, {1, 1, 1}});
}

inline singdeg::ZeroPattern randomPattern(std::mt19937_64& rng, singdeg::Index k, double density) {
    std::bernoulli_distribution coin(density);
    singdeg::ZeroPattern p(k);
    for (singdeg::Index i = 0; i < k; ++i) {
        for (singdeg::Index j = 0; j < k; ++j) p.set(i, j, coin(rng));
    }
    return p;
}

inline singdeg::ZeroPattern randomSymmetricPattern(std::mt19937_64& rng, singdeg::Index k, double density) {
    std::bernoulli_distribution coin(density);
    singdeg::ZeroPattern p(k);
    for (singdeg::Index i = 0; i < k; ++i) {
        for (singdeg::Index j = i; j < k; ++j) {
            const bool on = coin(rng);
            p.set(i, j, on);
            p.set(j, i, on);
        }
    }
    return p;
}

inline singdeg::IndexList randomPermutation(std::mt19937_64& rng, singdeg::Index k) {
    singdeg::IndexList perm(k);
    for (singdeg::Index i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

}  // namespace fixtures
