#include "singdeg/dyson.hpp"

#include "singdeg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace singdeg {

namespace {

void requireNoZeroRow(const VarianceProfile& S) {
    if (const auto row = S.pattern().firstZeroRow()) {
        throw Error(ErrorCode::ZeroRow, "row " + std::to_string(*row + 1) + " of the profile vanishes");
    }
}

void requirePositive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::NonPositiveInput, std::string(what) + " must be positive");
}

double maxAbs(const Eigen::VectorXd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
double maxAbs(const Eigen::VectorXcd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

// ---- imaginary axis -------------------------------------------------------

struct AxisResult {
    Eigen::VectorXd v;
    double residual = 0.0;
    int iterations = 0;
};

Eigen::VectorXd axisDefectVector(const Eigen::MatrixXd& S, double eta, const Eigen::VectorXd& v) {
    return Eigen::VectorXd::Ones(v.size()) - v.cwiseProduct((S * v).array().matrix() + Eigen::VectorXd::Constant(v.size(), eta));
}

// Newton on G(u) = 1 - v (eta + S v), v = exp(u), with backtracking on sup |G|.
std::optional<AxisResult> axisNewton(const Eigen::MatrixXd& S, double eta, Eigen::VectorXd u, const DysonOptions& opt) {
    const auto k = u.size();
    Eigen::VectorXd v = u.array().exp();
    Eigen::VectorXd g = axisDefectVector(S, eta, v);
    double res = maxAbs(g);
    for (int it = 0; it < opt.maxIter; ++it) {
        if (res <= opt.tol) return AxisResult{v, res, it};
        const Eigen::VectorXd sv = S * v;
        Eigen::MatrixXd jac = -(v.asDiagonal() * S * v.asDiagonal());
        for (Eigen::Index i = 0; i < k; ++i) jac(i, i) -= v(i) * (eta + sv(i));
        Eigen::VectorXd step = jac.fullPivLu().solve(-g);
        if (!step.allFinite()) return std::nullopt;
        const double longest = maxAbs(step);
        if (longest > 2.0) step *= 2.0 / longest;
        double t = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
            const Eigen::VectorXd trialU = u + t * step;
            const Eigen::VectorXd trialV = trialU.array().exp();
            const Eigen::VectorXd trialG = axisDefectVector(S, eta, trialV);
            const double trialRes = maxAbs(trialG);
            if (trialRes < res || (trialRes <= opt.tol)) {
                u = trialU;
                v = trialV;
                g = trialG;
                res = trialRes;
                accepted = true;
                break;
            }
        }
        if (!accepted) return res <= 10.0 * opt.tol ? std::optional<AxisResult>(AxisResult{v, res, it}) : std::nullopt;
    }
    if (res <= opt.tol) return AxisResult{v, res, opt.maxIter};
    return std::nullopt;
}

// Damped fixed point v <- (1 - theta) v + theta / (eta + S v), theta adapted to the defect.
std::optional<AxisResult> axisFixedPoint(const Eigen::MatrixXd& S, double eta, Eigen::VectorXd v, const DysonOptions& opt) {
    double theta = 1.0;
    double res = maxAbs(axisDefectVector(S, eta, v));
    for (int it = 0; it < opt.maxIter; ++it) {
        if (res <= opt.tol) return AxisResult{v, res, it};
        const Eigen::VectorXd target = ((S * v).array() + eta).inverse().matrix();
        const Eigen::VectorXd next = (1.0 - theta) * v + theta * target;
        const double nextRes = maxAbs(axisDefectVector(S, eta, next));
        if (nextRes > res && theta > 1e-6) {
            theta *= 0.5;
            continue;
        }
        v = next;
        res = nextRes;
        theta = std::min(1.0, 1.2 * theta);
    }
    if (res <= opt.tol) return AxisResult{v, res, opt.maxIter};
    return std::nullopt;
}

std::optional<AxisResult> axisSolve(const Eigen::MatrixXd& S, double eta, const Eigen::VectorXd& guess,
                                    const DysonOptions& opt) {
    if (opt.method == DysonMethod::Newton) return axisNewton(S, eta, guess.array().log().matrix(), opt);
    return axisFixedPoint(S, eta, guess, opt);
}

void checkAxisBounds(const Eigen::VectorXd& v, double eta) {
    if (!(v.array() > 0.0).all() || !v.allFinite()) {
        throw Error(ErrorCode::Internal, "imaginary-axis solution lost positivity");
    }
    // v <= 1/eta up to the accepted relative defect
    if ((v.array() * eta > 1.0 + 1e-8).any()) throw Error(ErrorCode::Internal, "solution exceeds 1/eta");
}

DysonState axisState(double eta, const AxisResult& r) {
    DysonState st;
    st.eta = eta;
    st.z = Complex(0.0, eta);
    st.v = r.v;
    st.m = Complex(0.0, 1.0) * r.v.cast<Complex>();
    st.residual = r.residual;
    st.iterations = r.iterations;
    return st;
}

// ---- upper half plane -----------------------------------------------------

struct PlaneResult {
    Eigen::VectorXcd m;
    double residual = 0.0;
    int iterations = 0;
};

Eigen::VectorXcd planeDefectVector(const Eigen::MatrixXcd& S, Complex z, const Eigen::VectorXcd& m) {
    Eigen::VectorXcd w = S * m;
    w.array() += z;
    return Eigen::VectorXcd::Ones(m.size()) + m.cwiseProduct(w);
}

std::optional<PlaneResult> planeNewton(const Eigen::MatrixXcd& S, Complex z, Eigen::VectorXcd m, const DysonOptions& opt) {
    const auto k = m.size();
    Eigen::VectorXcd g = planeDefectVector(S, z, m);
    double res = maxAbs(g);
    for (int it = 0; it < opt.maxIter; ++it) {
        if (res <= opt.tol) return PlaneResult{m, res, it};
        Eigen::VectorXcd sm = S * m;
        Eigen::MatrixXcd jac = m.asDiagonal() * S;
        for (Eigen::Index i = 0; i < k; ++i) jac(i, i) += z + sm(i);
        Eigen::VectorXcd step = jac.fullPivLu().solve(-g);
        if (!step.allFinite()) return std::nullopt;
        double t = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
            const Eigen::VectorXcd trial = m + t * step;
            if ((trial.array().imag() <= 0.0).any()) continue;
            const Eigen::VectorXcd trialG = planeDefectVector(S, z, trial);
            const double trialRes = maxAbs(trialG);
            if (trialRes < res) {
                m = trial;
                g = trialG;
                res = trialRes;
                accepted = true;
                break;
            }
        }
        if (!accepted) return res <= 10.0 * opt.tol ? std::optional<PlaneResult>(PlaneResult{m, res, it}) : std::nullopt;
    }
    if (res <= opt.tol) return PlaneResult{m, res, opt.maxIter};
    return std::nullopt;
}

std::optional<PlaneResult> planeFixedPoint(const Eigen::MatrixXcd& S, Complex z, Eigen::VectorXcd m, const DysonOptions& opt) {
    double theta = 1.0;
    double res = maxAbs(planeDefectVector(S, z, m));
    for (int it = 0; it < opt.maxIter; ++it) {
        if (res <= opt.tol) return PlaneResult{m, res, it};
        Eigen::VectorXcd w = S * m;
        w.array() += z;
        const Eigen::VectorXcd next = (1.0 - theta) * m - theta * w.cwiseInverse();
        const double nextRes = maxAbs(planeDefectVector(S, z, next));
        if (nextRes > res && theta > 1e-6) {
            theta *= 0.5;
            continue;
        }
        m = next;
        res = nextRes;
        theta = std::min(1.0, 1.2 * theta);
    }
    if (res <= opt.tol) return PlaneResult{m, res, opt.maxIter};
    return std::nullopt;
}

std::optional<PlaneResult> planeSolve(const Eigen::MatrixXcd& S, Complex z, const Eigen::VectorXcd& guess,
                                      const DysonOptions& opt) {
    std::optional<PlaneResult> r = opt.method == DysonMethod::Newton ? planeNewton(S, z, guess, opt)
                                                                      : planeFixedPoint(S, z, guess, opt);
    if (r && (r->m.array().imag() <= 0.0).any()) {
        throw Error(ErrorCode::ImaginarySignLost, "Im m left the upper half plane");
    }
    return r;
}

PlaneResult planeContinuation(const VarianceProfile& profile, Complex z, const DysonOptions& opt) {
    const Eigen::MatrixXcd S = profile.entries().cast<Complex>();
    const double target = z.imag();
    const double re = z.real();
    const double rowMax = profile.entries().rowwise().sum().maxCoeff();

    double eta = std::max(target, std::max(opt.startEta, 2.0 * std::sqrt(rowMax) + std::abs(re)));
    // far from the real line the map m -> -1/(z + S m) contracts
    Eigen::VectorXcd m = Eigen::VectorXcd::Constant(S.rows(), -1.0 / Complex(re, eta));
    DysonOptions start = opt;
    start.method = DysonMethod::FixedPoint;
    start.maxIter = std::max(opt.maxIter, 2000);
    auto r = planeSolve(S, Complex(re, eta), m, start);
    if (!r) throw Error(ErrorCode::NonConvergence, "no solution far from the real axis");
    int total = r->iterations;
    Eigen::VectorXcd prev = r->m;
    double prevEta = eta;
    m = r->m;
    double residual = r->residual;

    while (eta > target) {
        double ratio = opt.stepFactor;
        std::optional<PlaneResult> next;
        double nextEta = eta;
        for (int shrink = 0; shrink < 30 && !next; ++shrink) {
            nextEta = std::max(target, eta * ratio);
            Eigen::VectorXcd guess = m;
            if (prevEta != eta) guess += (m - prev) * ((nextEta - eta) / (eta - prevEta));
            if ((guess.array().imag() <= 0.0).any()) guess = m;
            try {
                next = planeSolve(S, Complex(re, nextEta), guess, opt);
            } catch (const Error&) {
                next.reset();
            }
            if (!next) ratio = std::sqrt(ratio);
        }
        if (!next) {
            throw Error(ErrorCode::NonConvergence, "continuation stalled at Im z = " + std::to_string(eta) +
                                                       ", defect " + std::to_string(residual));
        }
        prev = m;
        prevEta = eta;
        m = next->m;
        eta = nextEta;
        residual = next->residual;
        total += next->iterations;
    }
    return PlaneResult{m, residual, total};
}

double densityAt(const VarianceProfile& S, double tau, double epsilon, const DysonOptions& opt) {
    const auto r = planeContinuation(S, Complex(tau, epsilon), opt);
    return r.m.imag().mean() / std::numbers::pi;
}

}  // namespace

double imaginaryAxisDefect(const VarianceProfile& S, double eta, const Eigen::VectorXd& v) {
    return maxAbs(axisDefectVector(S.entries(), eta, v));
}

double complexDefect(const VarianceProfile& S, Complex z, const Eigen::VectorXcd& m) {
    return maxAbs(planeDefectVector(S.entries().cast<Complex>(), z, m));
}

std::vector<DysonState> solveImaginaryAxisPath(const VarianceProfile& profile, std::vector<double> etas,
                                               const DysonOptions& opt) {
    requireNoZeroRow(profile);
    for (double e : etas) requirePositive(e, "eta");
    std::vector<std::size_t> order(etas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return etas[a] > etas[b]; });
    std::vector<DysonState> out(etas.size());
    if (etas.empty()) return out;

    const Eigen::MatrixXd& S = profile.entries();
    const auto k = S.rows();
    double eta = std::max(opt.startEta, etas[order.front()]);
    const double rowMax = S.rowwise().sum().maxCoeff();
    DysonOptions start = opt;
    start.maxIter = std::max(opt.maxIter, 2000);
    auto r = axisFixedPoint(S, eta, Eigen::VectorXd::Constant(k, 1.0 / (eta + rowMax)), start);
    if (r && opt.method == DysonMethod::Newton) r = axisNewton(S, eta, r->v.array().log().matrix(), opt);
    if (!r) throw Error(ErrorCode::NonConvergence, "no solution at eta = " + std::to_string(eta));
    Eigen::VectorXd u = r->v.array().log();
    Eigen::VectorXd prevU = u;
    double prevEta = eta;
    AxisResult current = *r;

    std::size_t nextIdx = 0;
    const auto record = [&] {
        while (nextIdx < order.size() && etas[order[nextIdx]] >= eta) {
            if (etas[order[nextIdx]] == eta) {
                checkAxisBounds(current.v, eta);
                out[order[nextIdx]] = axisState(eta, current);
            } else {
                // requested eta above the start point: solve directly from the start state
                auto direct = axisSolve(S, etas[order[nextIdx]], current.v, start);
                if (!direct) throw Error(ErrorCode::NonConvergence, "no solution at eta = " + std::to_string(etas[order[nextIdx]]));
                out[order[nextIdx]] = axisState(etas[order[nextIdx]], *direct);
            }
            ++nextIdx;
        }
    };
    record();
    while (nextIdx < order.size()) {
        const double target = etas[order[nextIdx]];
        double ratio = opt.stepFactor;
        std::optional<AxisResult> next;
        double nextEta = eta;
        for (int shrink = 0; shrink < 30 && !next; ++shrink) {
            nextEta = std::max(target, eta * ratio);
            Eigen::VectorXd guess = u;
            if (prevEta != eta) {
                guess += (u - prevU) * (std::log(nextEta / eta) / std::log(eta / prevEta));
            }
            next = axisSolve(S, nextEta, guess.array().exp().matrix(), opt);
            if (!next) ratio = std::sqrt(ratio);
        }
        if (!next) {
            throw Error(ErrorCode::NonConvergence, "continuation stalled at eta = " + std::to_string(eta));
        }
        prevU = u;
        prevEta = eta;
        u = next->v.array().log();
        eta = nextEta;
        current = *next;
        record();
    }
    return out;
}

DysonState solveImaginaryAxis(const VarianceProfile& S, double eta, const DysonOptions& opt) {
    return solveImaginaryAxisPath(S, {eta}, opt).front();
}

DysonState solveUpperHalfPlane(const VarianceProfile& S, Complex z, const DysonOptions& opt) {
    requireNoZeroRow(S);
    requirePositive(z.imag(), "Im z");
    const auto r = planeContinuation(S, z, opt);
    DysonState st;
    st.z = z;
    st.eta = z.imag();
    st.m = r.m;
    st.v = r.m.imag();
    st.residual = r.residual;
    st.iterations = r.iterations;
    return st;
}

DensityCurve densityProfileSerial(const VarianceProfile& S, const std::vector<double>& tauGrid, double epsilon,
                                  const DysonOptions& opt) {
    requireNoZeroRow(S);
    requirePositive(epsilon, "epsilon");
    DensityCurve c{tauGrid, std::vector<double>(tauGrid.size()), epsilon};
    for (std::size_t i = 0; i < tauGrid.size(); ++i) c.rho[i] = densityAt(S, tauGrid[i], epsilon, opt);
    return c;
}

DensityCurve densityProfile(const VarianceProfile& S, const std::vector<double>& tauGrid, double epsilon,
                            const DysonOptions& opt) {
    requireNoZeroRow(S);
    requirePositive(epsilon, "epsilon");
    DensityCurve c{tauGrid, std::vector<double>(tauGrid.size()), epsilon};
    const auto n = static_cast<long long>(tauGrid.size());
    std::vector<std::optional<Error>> failures(tauGrid.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            c.rho[i] = densityAt(S, tauGrid[i], epsilon, opt);
        } catch (const Error& e) {
            failures[i] = e;
        }
    }
    for (auto& f : failures) {
        if (f) throw *f;
    }
    return c;
}

double variationalValue(const VarianceProfile& S, const Eigen::VectorXd& x, double eta) {
    if (x.size() != static_cast<Eigen::Index>(S.size())) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    if (!(x.array() > 0.0).all()) throw Error(ErrorCode::NonPositiveInput, "x must be positive");
    return 0.5 * x.dot(S.entries() * x) / static_cast<double>(x.size()) - x.array().log().mean() + eta * x.mean();
}

std::vector<double> geometricGrid(double lo, double hi, int pointsPerDecade) {
    requirePositive(lo, "grid bound");
    requirePositive(hi, "grid bound");
    if (pointsPerDecade <= 0 || lo > hi) throw Error(ErrorCode::InvalidArgument, "bad geometric grid");
    const double decades = std::log10(hi / lo);
    const int steps = std::max(1, static_cast<int>(std::lround(decades * pointsPerDecade)));
    std::vector<double> grid;
    for (int s = 0; s <= steps; ++s) grid.push_back(hi * std::pow(lo / hi, static_cast<double>(s) / steps));
    grid.back() = lo;
    return grid;
}

double leastSquaresSlope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "need two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "abscissae coincide");
    return sxy / sxx;
}

namespace {

// Block averages and spreads of a solution given in original coordinates.
void blockStats(const NormalForm& nf, const Eigen::VectorXd& v, std::vector<double>& avg, std::vector<double>& spread) {
    avg.assign(nf.blockCount(), 0.0);
    spread.assign(nf.blockCount(), 1.0);
    for (Index b = 0; b < nf.blockCount(); ++b) {
        double lo = INFINITY, hi = 0.0, sum = 0.0;
        for (auto idx : nf.members(b)) {
            const double x = v(static_cast<Eigen::Index>(idx));
            sum += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        avg[b] = sum / static_cast<double>(nf.dims[b]);
        spread[b] = hi / lo;
    }
}

Eigen::VectorXd toNormalOrder(const NormalForm& nf, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Index a = 0; a < nf.perm.size(); ++a) out(static_cast<Eigen::Index>(a)) = v(static_cast<Eigen::Index>(nf.perm[a]));
    return out;
}

}  // namespace

ScalingFit empiricalExponents(const VarianceProfile& S, double etaMin, double etaMax, int pointsPerDecade,
                              const DysonOptions& opt) {
    if (!(etaMin > 0.0) || !(etaMin < etaMax) || etaMax > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "need 0 < etaMin < etaMax <= 1");
    }
    const auto nf = symmetricNormalForm(S);
    const auto ex = indexExponents(buildRelation(nf));
    ScalingFit fit;
    fit.etaGrid = geometricGrid(etaMin, etaMax, pointsPerDecade);
    fit.predicted = ex.f;
    const auto states = solveImaginaryAxisPath(S, fit.etaGrid, opt);
    const Index n = nf.blockCount();
    std::vector<double> logEta;
    std::vector<std::vector<double>> logAvg(n);
    for (std::size_t e = 0; e < states.size(); ++e) {
        std::vector<double> avg, spread;
        blockStats(nf, states[e].v, avg, spread);
        std::vector<double> emp(n);
        for (Index b = 0; b < n; ++b) {
            emp[b] = -std::log(avg[b]) / std::log(fit.etaGrid[e]);
            logAvg[b].push_back(std::log(avg[b]));
        }
        logEta.push_back(std::log(fit.etaGrid[e]));
        fit.blockAverages.push_back(std::move(avg));
        fit.blockSpread.push_back(std::move(spread));
        fit.empirical.push_back(std::move(emp));
    }
    for (Index b = 0; b < n; ++b) {
        fit.fittedSlopes.push_back(leastSquaresSlope(logEta, logAvg[b]));
        fit.deviation.push_back(fit.fittedSlopes.back() + toDouble(ex.f[b]));
    }
    return fit;
}

RescaledData rescaledProfile(const VarianceProfile& S) {
    RescaledData d;
    d.nf = symmetricNormalForm(S);
    d.rel = buildRelation(d.nf);
    d.exponents = indexExponents(d.rel);
    d.Q = d.exponents.Q;
    const auto& f = d.exponents.f;
    const Index n = d.nf.blockCount();
    const Eigen::MatrixXd& P = d.nf.permutedProfile;
    d.S0 = Eigen::MatrixXd::Zero(P.rows(), P.cols());
    d.Sgt = Eigen::MatrixXd::Zero(P.rows(), P.cols());
    const auto copyBlock = [&](Eigen::MatrixXd& into, Index i, Index j) {
        const auto r = static_cast<Eigen::Index>(d.nf.offset(i));
        const auto c = static_cast<Eigen::Index>(d.nf.offset(j));
        const auto kr = static_cast<Eigen::Index>(d.nf.dims[i]);
        const auto kc = static_cast<Eigen::Index>(d.nf.dims[j]);
        into.block(r, c, kr, kc) = P.block(r, c, kr, kc);
    };
    for (Index i = 0; i < n; ++i) {
        copyBlock(d.S0, i, d.nf.complement(i));
        const auto succ = d.rel.successors(i);
        const auto pred = d.rel.predecessors(i);
        IndexList minimal;
        Rational lo(1), hi(-1);
        if (!succ.empty()) {
            lo = f[succ.front()];
            for (auto j : succ) lo = std::min(lo, f[j]);
            for (auto j : succ) {
                if (f[j] == lo) minimal.push_back(j);
            }
        }
        for (auto j : pred) hi = std::max(hi, f[j]);
        for (auto j : minimal) copyBlock(d.Sgt, i, d.nf.complement(j));
        d.succSets.push_back(minimal);
        d.h.push_back((lo - hi) / 2);
        if (d.h.back() != lo - f[i] || d.h.back() != f[i] - hi) {
            throw Error(ErrorCode::Internal, "gap to neighbouring exponents is not symmetric");
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (d.h[i] != d.h[d.nf.complement(i)] || d.h[i] <= 0) {
            throw Error(ErrorCode::Internal, "h is not positive and complement symmetric");
        }
    }
    return d;
}

namespace {

// Polynomial through (x_k, y_k) evaluated at 0 (Neville).
double extrapolateToZero(const std::vector<double>& x, std::vector<double> y) {
    const auto n = y.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
        }
    }
    return y[0];
}

double mdeResidual(const Eigen::MatrixXd& S0, const Eigen::VectorXd& w) {
    const Eigen::VectorXd defect = Eigen::VectorXd::Ones(w.size()) - w.cwiseProduct(S0 * w);
    return maxAbs(defect);
}

}  // namespace

LimitWeights limitWeights(const VarianceProfile& S, RescaledData& data, const std::vector<double>& etaGrid,
                          int order, const DysonOptions& opt) {
    if (order < 0 || etaGrid.size() < static_cast<std::size_t>(order + 1)) {
        throw Error(ErrorCode::InvalidArgument, "not enough grid points for the extrapolation order");
    }
    auto etas = etaGrid;
    std::sort(etas.begin(), etas.end());
    etas.resize(static_cast<std::size_t>(order + 1));
    const auto states = solveImaginaryAxisPath(S, etas, opt);

    const auto k = static_cast<Eigen::Index>(S.size());
    std::vector<double> omega;
    std::vector<Eigen::VectorXd> scaled;
    for (std::size_t e = 0; e < etas.size(); ++e) {
        omega.push_back(std::pow(etas[e], 1.0 / static_cast<double>(data.Q)));
        Eigen::VectorXd v = toNormalOrder(data.nf, states[e].v);
        for (Index b = 0; b < data.nf.blockCount(); ++b) {
            const double scale = std::pow(etas[e], toDouble(data.exponents.f[b]));
            v.segment(static_cast<Eigen::Index>(data.nf.offset(b)), static_cast<Eigen::Index>(data.nf.dims[b])) *= scale;
        }
        scaled.push_back(std::move(v));
    }
    LimitWeights lw;
    lw.w.resize(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        std::vector<double> y;
        for (const auto& v : scaled) y.push_back(v(a));
        lw.w(a) = extrapolateToZero(omega, y);
    }
    lw.mdeResidual = mdeResidual(data.S0, lw.w);
    lw.etaUsed = etas;
    data.w = lw.w;
    return lw;
}

RescaledResiduals rescaledResiduals(const RescaledData& data, const Eigen::VectorXd& w) {
    const auto& nf = data.nf;
    RescaledResiduals r;
    Eigen::VectorXd lead = w.cwiseProduct(data.S0 * w) - Eigen::VectorXd::Ones(w.size());
    // remove the component along e_l - e_complement(l) for every pair
    for (Index l = 0; l < nf.M; ++l) {
        const auto a = static_cast<Eigen::Index>(nf.offset(l));
        const auto b = static_cast<Eigen::Index>(nf.offset(nf.complement(l)));
        const auto k = static_cast<Eigen::Index>(nf.dims[l]);
        const double c = (lead.segment(a, k).sum() - lead.segment(b, k).sum()) / (2.0 * static_cast<double>(k));
        lead.segment(a, k).array() -= c;
        lead.segment(b, k).array() += c;
    }
    r.F0 = maxAbs(lead);

    const Eigen::VectorXd sw = data.Sgt * w;
    for (Index l = 0; l < nf.M; ++l) {
        const auto a = static_cast<Eigen::Index>(nf.offset(l));
        const auto b = static_cast<Eigen::Index>(nf.offset(nf.complement(l)));
        const auto k = static_cast<Eigen::Index>(nf.dims[l]);
        const double kd = static_cast<double>(k);
        double value = w.segment(a, k).dot(sw.segment(a, k)) / kd - w.segment(b, k).dot(sw.segment(b, k)) / kd;
        if (data.rel.predecessors(l).empty()) value -= w.segment(b, k).mean();
        r.Fl.push_back(std::abs(value));
    }
    return r;
}

AtomMass atomMassEstimate(const VarianceProfile& S, const std::vector<double>& etaGrid, const DysonOptions& opt) {
    requireNoZeroRow(S);
    const auto sc = maximalZeroSubmatrix(S.pattern());
    if (sc.tag != SupportTag::NoSupport) throw Error(ErrorCode::HasSupport, "profile has a positive diagonal");
    if (etaGrid.empty()) throw Error(ErrorCode::InvalidArgument, "empty eta grid");
    AtomMass a;
    a.eta = *std::min_element(etaGrid.begin(), etaGrid.end());
    const auto st = solveImaginaryAxis(S, a.eta, opt);
    a.kappaNumeric = a.eta * st.v.mean();
    a.kappaExact = *sc.kappa;
    return a;
}

Quantile quantile(const DensityCurve& curve, const Rational& sigma, long long N) {
    if (N <= 0) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    if (sigma < 0 || sigma >= 1) throw Error(ErrorCode::InvalidArgument, "sigma must lie in [0, 1)");
    Quantile q;
    q.predictedSlope = -1.0 / (1.0 - toDouble(sigma));
    const auto& t = curve.tau;
    const auto& rho = curve.rho;
    if (t.size() < 2 || t.front() != 0.0) throw Error(ErrorCode::GridTooCoarse, "grid must start at 0");
    const double target = 1.0 / static_cast<double>(N);
    double mass = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double cell = 0.5 * (rho[i - 1] + rho[i]) * (t[i] - t[i - 1]);
        if (mass + cell >= target) {
            if (i == 1) throw Error(ErrorCode::GridTooCoarse, "quantile falls inside the first grid cell");
            q.gamma = t[i - 1] + (t[i] - t[i - 1]) * (target - mass) / cell;
            return q;
        }
        mass += cell;
    }
    throw Error(ErrorCode::GridTooCoarse, "grid mass " + std::to_string(mass) + " stays below 1/N");
}

}  // namespace singdeg
