#include "fixtures.hpp"
#include "singdeg/dyson.hpp"
#include "singdeg/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace singdeg;

namespace {

VarianceProfile profileOf(const ZeroPattern& p) { return VarianceProfile::fromPattern(p); }

ErrorCode codeOf(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

VarianceProfile randomProfile(std::mt19937_64& rng, Index k) {
    std::uniform_real_distribution<double> unit(0.1, 2.0);
    for (;;) {
        const auto p = fixtures::randomSymmetricPattern(rng, k, 0.4);
        if (p.firstZeroRow()) continue;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for (Index i = 0; i < k; ++i) {
            for (Index j = i; j < k; ++j) {
                if (p(i, j)) m(i, j) = m(j, i) = unit(rng);
            }
        }
        return VarianceProfile(m);
    }
}

const double goldenRatioConjugate = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

TEST_CASE("imaginary axis closed forms") {
    const auto ones = profileOf(ZeroPattern::allOnes(1));
    const auto st = solveImaginaryAxis(ones, 1.0);
    CHECK(std::abs(st.v(0) - goldenRatioConjugate) < 1e-10);
    CHECK(st.residual <= 1e-12);

    const auto two = solveImaginaryAxis(profileOf(ZeroPattern::fromRows({{1, 1}, {1, 0}})), 1e-6);
    CHECK(std::abs(two.v(0) / 1e-2 - 1.0) < 0.05);
    CHECK(std::abs(two.v(1) / 1e2 - 1.0) < 0.05);

    const auto fp = solveImaginaryAxis(ones, 1.0, {.method = DysonMethod::FixedPoint});
    CHECK(std::abs(fp.v(0) - goldenRatioConjugate) < 1e-10);
}

TEST_CASE("a priori bounds and variational principle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto S = randomProfile(rng, 2 + trial % 6);
        const double rowMax = S.entries().rowwise().sum().maxCoeff();
        const auto far = solveImaginaryAxis(S, 10.0);
        CHECK((far.v.array() <= 0.1).all());
        CHECK((far.v.array() >= 1.0 / (10.0 + rowMax)).all());

        for (double eta : {1e-1, 1e-3, 1e-6}) {
            const auto st = solveImaginaryAxis(S, eta);
            CHECK((st.v.array() * eta <= 1.0).all());
        }

        const auto st = solveImaginaryAxis(S, 0.1);
        const Eigen::VectorXd e = Eigen::VectorXd::Ones(st.v.size());
        CHECK(variationalValue(S, st.v, 0.1) <= variationalValue(S, e, 0.1));
        const Eigen::VectorXd shifted = st.v.array() + 0.1;
        CHECK(variationalValue(S, shifted, 0.1) > variationalValue(S, st.v, 0.1));

        const auto newton = solveImaginaryAxis(S, 1e-2);
        const auto fixed = solveImaginaryAxis(S, 1e-2, {.tol = 1e-12, .maxIter = 200000, .method = DysonMethod::FixedPoint});
        CHECK((newton.v - fixed.v).cwiseAbs().maxCoeff() <= 1e-8 * newton.v.cwiseAbs().maxCoeff());
    }
    CHECK(variationalValue(profileOf(ZeroPattern::allOnes(1)), Eigen::VectorXd::Ones(1), 0.0) == doctest::Approx(0.5));
    CHECK(codeOf([] { variationalValue(profileOf(ZeroPattern::allOnes(2)), Eigen::Vector2d(1.0, 0.0), 0.0); }) ==
          ErrorCode::NonPositiveInput);
}

TEST_CASE("input errors") {
    const auto zeroRow = VarianceProfile(Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}});
    CHECK(codeOf([&] { solveImaginaryAxis(zeroRow, 1.0); }) == ErrorCode::ZeroRow);
    CHECK(codeOf([] { solveImaginaryAxis(profileOf(ZeroPattern::allOnes(2)), 0.0); }) == ErrorCode::NonPositiveInput);
    CHECK(codeOf([] { solveUpperHalfPlane(profileOf(ZeroPattern::allOnes(2)), {0.3, -0.1}); }) ==
          ErrorCode::NonPositiveInput);
}

TEST_CASE("upper half plane") {
    const auto ones = profileOf(ZeroPattern::allOnes(1));
    const auto at_i = solveUpperHalfPlane(ones, {0.0, 1.0});
    CHECK(std::abs(at_i.m(0) - Complex(0.0, goldenRatioConjugate)) < 1e-10);

    const auto near = solveUpperHalfPlane(ones, {0.5, 0.01});
    const double semicircle = std::sqrt(4.0 - 0.25) / (2.0 * std::numbers::pi);
    CHECK(std::abs(near.m(0).imag() / std::numbers::pi / semicircle - 1.0) < 0.02);

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto S = randomProfile(rng, 2 + trial % 5);
        const auto axis = solveImaginaryAxis(S, 0.05);
        const auto plane = solveUpperHalfPlane(S, {0.0, 0.05});
        CHECK((plane.m - Complex(0.0, 1.0) * axis.v.cast<Complex>()).cwiseAbs().maxCoeff() <=
              1e-9 * axis.v.maxCoeff());
        const Complex z(0.37, 0.02);
        const auto right = solveUpperHalfPlane(S, z);
        const auto left = solveUpperHalfPlane(S, -std::conj(z));
        CHECK((left.m + right.m.conjugate()).cwiseAbs().maxCoeff() <= 1e-9 * right.m.cwiseAbs().maxCoeff());
        CHECK((right.m.array().imag() > 0.0).all());
        CHECK(complexDefect(S, z, right.m) <= 1e-10);
    }
}

TEST_CASE("density of states") {
    const auto ones = profileOf(ZeroPattern::allOnes(1));
    const auto at0 = densityProfile(ones, {0.0}, 1e-4);
    CHECK(std::abs(at0.rho[0] - 1.0 / std::numbers::pi) < 1e-3);

    std::vector<double> grid;
    for (int i = -40; i <= 40; ++i) grid.push_back(0.06 * i);
    const auto S = profileOf(fixtures::upperAntiTriangle(3));
    const auto par = densityProfile(S, grid, 1e-3);
    const auto ser = densityProfileSerial(S, grid, 1e-3);
    CHECK(par.rho == ser.rho);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(par.rho[i] >= 0.0);
        CHECK(std::abs(par.rho[i] - par.rho[grid.size() - 1 - i]) <= 1e-8 * (1.0 + par.rho[i]));
    }
}

TEST_CASE("singular density flattens after rescaling") {
    // tau^(1/3) rho(tau) over two decades
    const auto S = profileOf(ZeroPattern::fromRows({{1, 1}, {1, 0}}));
    std::vector<double> tau = geometricGrid(1e-4, 1e-2, 4);
    const auto curve = densityProfile(S, tau, 1e-8);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double scaled = std::cbrt(tau[i]) * curve.rho[i];
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    CHECK(lo > 0.0);
    CHECK((hi - lo) / hi < 0.1);
}

TEST_CASE("exponent fits") {
    const auto ones = empiricalExponents(profileOf(ZeroPattern::allOnes(3)), 1e-8, 1e-2, 4);
    CHECK(std::abs(ones.fittedSlopes[0]) < 0.01);

    const auto two = empiricalExponents(profileOf(ZeroPattern::fromRows({{1, 1}, {1, 0}})), 1e-10, 1e-4, 4);
    CHECK(two.fittedSlopes[0] == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    CHECK(two.fittedSlopes[1] == doctest::Approx(-1.0 / 3.0).epsilon(0.03));

    const auto three = empiricalExponents(profileOf(fixtures::upperAntiTriangle(3)), 1e-10, 1e-4, 4);
    CHECK(std::abs(three.fittedSlopes[0] - 0.5) < 0.02);
    CHECK(std::abs(three.fittedSlopes[1]) < 0.02);
    CHECK(std::abs(three.fittedSlopes[2] + 0.5) < 0.02);
    for (auto d : three.deviation) CHECK(std::abs(d) < 0.02);
}

TEST_CASE("block comparison relations along the grid") {
    const auto S = profileOf(fixtures::tenPattern());
    const auto nf = symmetricNormalForm(S);
    const auto rel = buildRelation(nf);
    const auto fit = empiricalExponents(S, 1e-10, 1e-2, 2);
    const Index n = nf.blockCount();
    std::vector<double> productRange(n, 0.0), pathRange(n, 0.0);
    std::vector<double> productFirst(n), pathFirst(n);
    for (std::size_t e = 0; e < fit.etaGrid.size(); ++e) {
        const double eta = fit.etaGrid[e];
        const auto& avg = fit.blockAverages[e];
        for (Index b = 0; b < n; ++b) {
            CHECK(fit.blockSpread[e][b] < 1e3);
            const double product = std::log(avg[b] * avg[nf.complement(b)]);
            double hi = eta, lo = 1.0 / eta;  // source and sink values
            for (auto j : rel.predecessors(b)) hi = std::max(hi, avg[j]);
            for (auto j : rel.successors(b)) lo = std::min(lo, avg[j]);
            const double path = 2.0 * std::log(avg[b]) - std::log(hi * lo);
            if (e == 0) {
                productFirst[b] = product;
                pathFirst[b] = path;
            }
            productRange[b] = std::max(productRange[b], std::abs(product - productFirst[b]));
            pathRange[b] = std::max(pathRange[b], std::abs(path - pathFirst[b]));
        }
    }
    // eight decades of eta move log<v> by up to ~12; these combinations stay put
    for (Index b = 0; b < n; ++b) {
        CHECK(productRange[b] < 3.0);
        CHECK(pathRange[b] < 3.0);
    }
}

TEST_CASE("rescaled profile") {
    const auto ones = rescaledProfile(profileOf(ZeroPattern::allOnes(2)));
    CHECK(ones.S0 == ones.nf.permutedProfile);
    CHECK(ones.Sgt.isZero());
    CHECK(ones.h == std::vector<Rational>{Rational(1)});

    const auto two = rescaledProfile(profileOf(ZeroPattern::fromRows({{1, 1}, {1, 0}})));
    CHECK(two.S0 == Eigen::Matrix2d{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(two.Sgt == Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}});
    CHECK(two.h == std::vector<Rational>{Rational(2, 3), Rational(2, 3)});
    CHECK(two.succSets == std::vector<IndexList>{{1}, {}});
    const auto exact = rescaledResiduals(two, Eigen::Vector2d(1.0, 1.0));
    CHECK(exact.F0 == 0.0);
    CHECK(exact.Fl == std::vector<double>{0.0});

    std::mt19937_64 rng(8);
    int seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = fixtures::randomSymmetricPattern(rng, 2 + trial % 8, 0.3);
        if (!hasSupport(p)) continue;
        const auto d = rescaledProfile(profileOf(p));
        const auto& f = d.exponents.f;
        for (Index i = 0; i < d.nf.blockCount(); ++i) {
            CHECK(d.h[i] == d.h[d.nf.complement(i)]);
            Rational hi(-1), lo(1);
            for (auto j : d.rel.predecessors(i)) hi = std::max(hi, f[j]);
            for (auto j : d.rel.successors(i)) lo = std::min(lo, f[j]);
            CHECK(d.h[i] == f[i] - hi);
            CHECK(d.h[i] == lo - f[i]);
        }
        ++seen;
    }
    CHECK(seen > 50);
}

TEST_CASE("limit weights") {
    const auto small = geometricGrid(1e-12, 1e-10, 1);
    {
        const auto S = profileOf(ZeroPattern::allOnes(1));
        auto d = rescaledProfile(S);
        const auto lw = limitWeights(S, d, small);
        CHECK(std::abs(lw.w(0) - 1.0) < 1e-10);
        CHECK(lw.mdeResidual < 1e-10);
    }
    {
        const auto S = profileOf(ZeroPattern::fromRows({{1, 1}, {1, 0}}));
        auto d = rescaledProfile(S);
        const auto lw = limitWeights(S, d, small);
        CHECK(std::abs(lw.w(0) - 1.0) < 1e-4);
        CHECK(std::abs(lw.w(1) - 1.0) < 1e-4);
        CHECK(lw.mdeResidual <= 1e-4);
    }
    {
        const auto S = profileOf(fixtures::upperAntiTriangle(3));
        auto d = rescaledProfile(S);
        const auto lw = limitWeights(S, d, small);
        CHECK(lw.mdeResidual <= 1e-4);
        const auto r = rescaledResiduals(d, lw.w);
        CHECK(r.F0 <= 1e-3);
        for (auto x : r.Fl) CHECK(x <= 1e-3);
    }
}

TEST_CASE("atom at zero") {
    const auto S = profileOf(fixtures::noSupportExample());
    const auto a = atomMassEstimate(S, {1e-8});
    CHECK(a.kappaExact == Rational(1, 3));
    CHECK(std::abs(a.kappaNumeric - 1.0 / 3.0) < 1e-4);
    CHECK(codeOf([] { atomMassEstimate(profileOf(ZeroPattern::allOnes(2)), {1e-8}); }) == ErrorCode::HasSupport);

    const auto sum = profileOf(ZeroPattern::fromRows({{0, 0, 1, 0}, {0, 0, 1, 0}, {1, 1, 1, 0}, {0, 0, 0, 1}}));
    const auto b = atomMassEstimate(sum, {1e-8});
    CHECK(b.kappaExact == Rational(1, 4));
    CHECK(std::abs(b.kappaNumeric - 0.25) < 1e-4);
}

TEST_CASE("quantile of the density") {
    const DensityCurve flat{{0.0, 0.1, 0.2, 0.3, 0.4}, {1.0, 1.0, 1.0, 1.0, 1.0}, 1e-3};
    CHECK(quantile(flat, Rational(1, 3), 4).predictedSlope == doctest::Approx(-1.5));
    CHECK(quantile(flat, Rational(1, 2), 4).predictedSlope == doctest::Approx(-2.0));
    const auto q = quantile(flat, Rational(0), 4);
    CHECK(q.predictedSlope == doctest::Approx(-1.0));
    CHECK(q.gamma == doctest::Approx(0.25));
    CHECK(codeOf([] { quantile(DensityCurve{{0.0, 1.0}, {0.1, 0.1}, 1e-3}, Rational(0), 2); }) ==
          ErrorCode::GridTooCoarse);
    CHECK(codeOf([] { quantile(DensityCurve{{0.5, 1.0, 2.0}, {1.0, 1.0, 1.0}, 1e-3}, Rational(0), 2); }) ==
          ErrorCode::GridTooCoarse);
}
