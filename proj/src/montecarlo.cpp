#include "singdeg/montecarlo.hpp"

#include "singdeg/error.hpp"

#include <lapacke.h>
#include <omp.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>

namespace singdeg {

namespace {

using Complex = std::complex<double>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void validate(const EnsembleConfig& cfg) {
    if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
    if (cfg.blockSizes.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three block sizes");
    for (std::size_t i = 0; i < cfg.blockSizes.size(); ++i) {
        if (cfg.blockSizes[i] < 1) throw Error(ErrorCode::InvalidArgument, "block sizes must be positive");
        if (i > 0 && cfg.blockSizes[i] <= cfg.blockSizes[i - 1])
            throw Error(ErrorCode::InvalidArgument, "block sizes must be strictly increasing");
    }
    if (cfg.profile.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty profile");
}

struct Trial {
    double smin = 0.0;
    double cond = 0.0;
};

Trial runTrial(const EnsembleConfig& cfg, std::size_t sizeIdx, std::size_t trialIdx) {
    const auto seed = trialSeed(cfg.masterSeed, sizeIdx, trialIdx);
    try {
        const auto H = sampleBlockHermitian(cfg.profile, cfg.blockSizes[sizeIdx], seed, cfg.entryType);
        const Eigen::VectorXd ev = hermitianEigenvalues(H).cwiseAbs();
        const double lo = ev.minCoeff();
        if (lo == 0.0) throw Error(ErrorCode::SingularMatrix, "exactly singular sample");
        return {lo, ev.maxCoeff() / lo};
    } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (n=" + std::to_string(cfg.blockSizes[sizeIdx]) +
                                  ", trial=" + std::to_string(trialIdx) + ", seed=" + std::to_string(seed) + ")");
    }
}

SweepReport reduce(const EnsembleConfig& cfg, const std::vector<Trial>& trials) {
    SweepReport rep;
    const auto K = cfg.profile.size();
    const auto T = static_cast<std::size_t>(cfg.trials);
    std::vector<double> x, y;
    for (std::size_t s = 0; s < cfg.blockSizes.size(); ++s) {
        double sum = 0.0, sumCond = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            sum += trials[s * T + t].smin;
            sumCond += trials[s * T + t].cond;
        }
        const double mean = sum / static_cast<double>(T);
        double var = 0.0;
        for (std::size_t t = 0; t < T; ++t) var += std::pow(trials[s * T + t].smin - mean, 2);
        const double se = T > 1 ? std::sqrt(var / static_cast<double>(T - 1) / static_cast<double>(T)) : 0.0;
        SizeStats st{cfg.blockSizes[s], cfg.blockSizes[s] * K, mean, se, sumCond / static_cast<double>(T)};
        rep.sizes.push_back(st);
        x.push_back(std::log(static_cast<double>(st.N)));
        y.push_back(std::log(mean));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    rep.fittedSlope = sxy / sxx;
    rep.intercept = my - rep.fittedSlope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - rep.intercept - rep.fittedSlope * x[i], 2);
    rep.fitResidual = std::sqrt(rss / n);
    return rep;
}

}  // namespace

std::uint64_t trialSeed(std::uint64_t master, std::uint64_t sizeIndex, std::uint64_t trialIndex) {
    return splitmix64(splitmix64(splitmix64(master) ^ sizeIndex) ^ trialIndex);
}

Eigen::MatrixXcd sampleBlockHermitian(const VarianceProfile& S, Index n, std::uint64_t seed, EntryType type) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
    const Index K = S.size();
    const Index N = n * K;
    const auto dimN = static_cast<Eigen::Index>(N);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dimN, dimN);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss;
    const double invN = 1.0 / static_cast<double>(N);
    // upper triangle row by row
    for (Index a = 0; a < N; ++a) {
        const Index l = a / n;
        for (Index b = a; b < N; ++b) {
            const double s = S.entries()(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(b / n));
            if (s == 0.0) continue;
            const double sd = std::sqrt(s * invN);
            Complex h;
            if (a == b || type == EntryType::RealGaussian) {
                h = {sd * gauss(gen), 0.0};
            } else {
                const double re = gauss(gen);
                const double im = gauss(gen);
                h = Complex(re, im) * (sd / std::sqrt(2.0));
            }
            H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = h;
            H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = std::conj(h);
        }
    }
    return H;
}

Eigen::VectorXd hermitianEigenvalues(const Eigen::MatrixXcd& H) {
    const auto N = H.rows();
    if (H.cols() != N) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
    Eigen::VectorXd w(N);
    if (N == 0) return w;
    Eigen::MatrixXcd a = H;  // overwritten by zheevd
    const auto info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(N),
                                     reinterpret_cast<lapack_complex_double*>(a.data()), static_cast<lapack_int>(N),
                                     w.data());
    if (info != 0) throw Error(ErrorCode::EigFailure, "zheevd returned info=" + std::to_string(info));
    if (!w.allFinite()) throw Error(ErrorCode::EigFailure, "non-finite eigenvalue");

    const double trace = H.diagonal().real().sum();
    const double fro2 = H.squaredNorm();
    if (std::abs(w.sum() - trace) > 1e-8 * static_cast<double>(N))
        throw Error(ErrorCode::EigFailure, "eigenvalue sum does not match the trace");
    if (std::abs(w.squaredNorm() - fro2) > 1e-8 * std::max(fro2, 1e-300))
        throw Error(ErrorCode::EigFailure, "eigenvalue squares do not match the Frobenius norm");
    return w;
}

double smallestSingularValue(const Eigen::MatrixXcd& H) { return hermitianEigenvalues(H).cwiseAbs().minCoeff(); }

double conditionNumber(const Eigen::MatrixXcd& H) {
    const Eigen::VectorXd a = hermitianEigenvalues(H).cwiseAbs();
    const double lo = a.minCoeff();
    if (lo == 0.0) throw Error(ErrorCode::SingularMatrix, "smallest singular value is zero");
    return a.maxCoeff() / lo;
}

SweepReport runSweep(const EnsembleConfig& cfg, int threads) {
    validate(cfg);
    const auto T = static_cast<std::size_t>(cfg.trials);
    const auto total = static_cast<long long>(cfg.blockSizes.size() * T);
    std::vector<Trial> out(static_cast<std::size_t>(total));
    std::vector<std::optional<Error>> errors(static_cast<std::size_t>(total));
    const int nt = threads > 0 ? threads : omp_get_max_threads();

    // largest matrices first so the tail of the schedule is short
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (long long k = total - 1; k >= 0; --k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            out[idx] = runTrial(cfg, idx / T, idx % T);
        } catch (const Error& e) {
            errors[idx] = e;
        } catch (const std::exception& e) {
            errors[idx] = Error(ErrorCode::Internal, e.what());
        }
    }
    for (auto& e : errors)
        if (e) throw *e;
    return reduce(cfg, out);
}

SweepReport runSweepSerial(const EnsembleConfig& cfg) {
    validate(cfg);
    const auto T = static_cast<std::size_t>(cfg.trials);
    std::vector<Trial> out;
    out.reserve(cfg.blockSizes.size() * T);
    for (std::size_t s = 0; s < cfg.blockSizes.size(); ++s)
        for (std::size_t t = 0; t < T; ++t) out.push_back(runTrial(cfg, s, t));
    return reduce(cfg, out);
}

void writeSweepCsv(std::ostream& os, const SweepReport& report) {
    os << "size_n,dim_N,mean_smin,stderr_smin,mean_cond\n";
    char buf[160];
    for (const auto& s : report.sizes) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g,%.12g\n", s.n, s.N, s.meanSmin, s.stderrSmin, s.meanCond);
        os << buf;
    }
}

}  // namespace singdeg
