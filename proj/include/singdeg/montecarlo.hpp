#pragma once

// Hermitian random block matrices with a variance profile; least singular
// value and condition number sweeps over the block size.

#include "singdeg/normal_form.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace singdeg {

enum class EntryType { ComplexGaussian, RealGaussian };

struct EnsembleConfig {
    VarianceProfile profile;
    std::vector<Index> blockSizes;  ///< strictly increasing, at least three for the fit
    int trials = 200;
    std::uint64_t masterSeed = 1;
    EntryType entryType = EntryType::ComplexGaussian;
};

struct SizeStats {
    Index n = 0;
    Index N = 0;  ///< n K
    double meanSmin = 0.0;
    double stderrSmin = 0.0;
    double meanCond = 0.0;
};

struct SweepReport {
    std::vector<SizeStats> sizes;
    double fittedSlope = 0.0;  ///< of log mean s_min against log N
    double intercept = 0.0;
    double fitResidual = 0.0;  ///< root mean square
};

/// N x N Hermitian matrix, N = nK. Block (l, k) entries have variance s_lk / N;
/// the diagonal is real. Deterministic in seed.
Eigen::MatrixXcd sampleBlockHermitian(const VarianceProfile& S, Index n, std::uint64_t seed,
                                      EntryType type = EntryType::ComplexGaussian);

/// Ascending eigenvalues; trace and Frobenius norm are checked against the spectrum.
/// Throws EigFailure.
Eigen::VectorXd hermitianEigenvalues(const Eigen::MatrixXcd& H);

double smallestSingularValue(const Eigen::MatrixXcd& H);
/// max|lambda| / min|lambda|; throws SingularMatrix.
double conditionNumber(const Eigen::MatrixXcd& H);

/// Child seed of (masterSeed, sizeIndex, trialIndex).
std::uint64_t trialSeed(std::uint64_t master, std::uint64_t sizeIndex, std::uint64_t trialIndex);

/// Trials run on OpenMP threads (threads <= 0 keeps the runtime default);
/// the result does not depend on the thread count.
SweepReport runSweep(const EnsembleConfig& cfg, int threads = 0);
/// Reference loop, one trial after another.
SweepReport runSweepSerial(const EnsembleConfig& cfg);

/// Header size_n,dim_N,mean_smin,stderr_smin,mean_cond and one line per size.
void writeSweepCsv(std::ostream& os, const SweepReport& report);

}  // namespace singdeg
