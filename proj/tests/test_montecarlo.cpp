#include "fixtures.hpp"
#include "singdeg/error.hpp"
#include "singdeg/montecarlo.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

using namespace singdeg;

namespace {

ErrorCode codeOf(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

Eigen::MatrixXcd diag(std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return v.cast<std::complex<double>>().asDiagonal();
}

Eigen::VectorXd svdValues(const Eigen::MatrixXcd& H) {
    return Eigen::BDCSVD<Eigen::MatrixXcd>(H).singularValues();
}

}  // namespace

TEST_CASE("sampling") {
    const auto ones = VarianceProfile::fromPattern(ZeroPattern::allOnes(4));
    const auto H = sampleBlockHermitian(ones, 128, 99);
    CHECK(H.rows() == 512);
    CHECK(H.isApprox(H.adjoint(), 0.0));
    CHECK(H.diagonal().imag().isZero(0.0));
    const double norm = hermitianEigenvalues(H).cwiseAbs().maxCoeff();
    CHECK(norm >= 1.8);
    CHECK(norm <= 2.2);

    CHECK(sampleBlockHermitian(ones, 16, 5) == sampleBlockHermitian(ones, 16, 5));
    CHECK(sampleBlockHermitian(ones, 16, 5) != sampleBlockHermitian(ones, 16, 6));

    const auto two = VarianceProfile(Eigen::Matrix2d{{2.0, 1.0}, {1.0, 0.0}});
    const Index n = 200;
    const auto G = sampleBlockHermitian(two, n, 3);
    const auto nn = static_cast<Eigen::Index>(n);
    CHECK(G.bottomRightCorner(nn, nn).isZero(0.0));
    const double N = 2.0 * static_cast<double>(n);
    CHECK(G.topLeftCorner(nn, nn).cwiseAbs2().mean() * N == doctest::Approx(2.0).epsilon(0.03));
    CHECK(G.topRightCorner(nn, nn).cwiseAbs2().mean() * N == doctest::Approx(1.0).epsilon(0.03));

    const auto real = sampleBlockHermitian(ones, 8, 1, EntryType::RealGaussian);
    CHECK(real.imag().isZero(0.0));
    CHECK(codeOf([&] { sampleBlockHermitian(ones, 0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("eigenvalue based quantities") {
    CHECK(smallestSingularValue(diag({3.0, -0.5, 2.0})) == doctest::Approx(0.5));
    Eigen::MatrixXcd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    CHECK(smallestSingularValue(swap) == doctest::Approx(1.0));
    CHECK(conditionNumber(Eigen::MatrixXcd::Identity(5, 5)) == doctest::Approx(1.0));
    CHECK(conditionNumber(diag({4.0, 2.0})) == doctest::Approx(2.0));
    CHECK(codeOf([] { conditionNumber(diag({1.0, 0.0})); }) == ErrorCode::SingularMatrix);

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(3, 3);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(codeOf([&] { hermitianEigenvalues(bad); }) == ErrorCode::EigFailure);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = fixtures::randomSymmetricPattern(rng, 2, 0.7);
        if (p.firstZeroRow()) continue;
        const auto H = sampleBlockHermitian(VarianceProfile::fromPattern(p), 4, rng());
        const auto sv = svdValues(H);
        CHECK(std::abs(smallestSingularValue(H) - sv.minCoeff()) <= 1e-10);
        const Eigen::VectorXd ev = hermitianEigenvalues(H);
        CHECK(std::abs(ev.cwiseAbs().maxCoeff() - sv.maxCoeff()) <= 1e-10);
        const double viaInverse = sv.maxCoeff() * svdValues(H.inverse()).maxCoeff();
        CHECK(conditionNumber(H) == doctest::Approx(viaInverse).epsilon(1e-8));
    }
}

TEST_CASE("seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 20; ++s)
        for (std::uint64_t t = 0; t < 200; ++t) seen.insert(trialSeed(7, s, t));
    CHECK(seen.size() == 4000);
    CHECK(trialSeed(7, 1, 2) != trialSeed(8, 1, 2));
    CHECK(trialSeed(7, 1, 2) != trialSeed(7, 2, 1));
}

TEST_CASE("sweep determinism and validation") {
    EnsembleConfig cfg{VarianceProfile::fromPattern(fixtures::upperAntiTriangle(2)), {4, 8, 16}, 12, 42};
    const auto serial = runSweepSerial(cfg);
    for (int threads : {1, 2, 3}) {
        const auto par = runSweep(cfg, threads);
        REQUIRE(par.sizes.size() == serial.sizes.size());
        for (std::size_t i = 0; i < par.sizes.size(); ++i) {
            CHECK(par.sizes[i].meanSmin == serial.sizes[i].meanSmin);
            CHECK(par.sizes[i].stderrSmin == serial.sizes[i].stderrSmin);
            CHECK(par.sizes[i].meanCond == serial.sizes[i].meanCond);
        }
        CHECK(par.fittedSlope == serial.fittedSlope);
    }
    CHECK(serial.sizes[2].N == 32);
    for (const auto& s : serial.sizes) {
        CHECK(s.meanSmin > 0.0);
        CHECK(s.meanCond >= 1.0);
    }

    std::ostringstream os;
    writeSweepCsv(os, serial);
    const auto csv = os.str();
    CHECK(csv.rfind("size_n,dim_N,mean_smin,stderr_smin,mean_cond\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    auto broken = cfg;
    broken.trials = 0;
    CHECK(codeOf([&] { runSweep(broken); }) == ErrorCode::InvalidArgument);
    broken = cfg;
    broken.blockSizes = {4, 4, 8};
    CHECK(codeOf([&] { runSweepSerial(broken); }) == ErrorCode::InvalidArgument);
    broken.blockSizes = {4, 8};
    CHECK(codeOf([&] { runSweep(broken); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bounded density gives inverse linear scaling") {
    EnsembleConfig cfg{VarianceProfile::fromPattern(ZeroPattern::allOnes(1)), {32, 64, 128, 256}, 100, 2024};
    const auto rep = runSweep(cfg);
    CHECK(std::abs(rep.fittedSlope + 1.0) < 0.2);
}
