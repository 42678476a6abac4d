#pragma once

// Vector Dyson equation -1/m = z + S m: imaginary-axis and complex solves,
// density of states, power-law exponent fits, rescaled limit equations and
// the atom at zero for profiles without support.

#include "singdeg/minmax.hpp"
#include "singdeg/normal_form.hpp"
#include "singdeg/rational.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace singdeg {

using Complex = std::complex<double>;

enum class DysonMethod { Newton, FixedPoint };

struct DysonOptions {
    double tol = 1e-12;          ///< relative defect max_i |1 + m_i (z + S m)_i|
    int maxIter = 500;           ///< per solve at one spectral parameter
    DysonMethod method = DysonMethod::Newton;
    double stepFactor = 0.5;     ///< continuation ratio for the imaginary part
    double startEta = 10.0;
};

struct DysonState {
    double eta = 0.0;
    Complex z;
    Eigen::VectorXd v;           ///< imaginary-axis solution (m = i v)
    Eigen::VectorXcd m;          ///< complex solution
    double residual = 0.0;
    int iterations = 0;
};

/// Solution at z = i eta; continuation from startEta down, warm starts
/// extrapolated in log eta. Throws ZeroRow, NonPositiveInput, NonConvergence.
DysonState solveImaginaryAxis(const VarianceProfile& S, double eta, const DysonOptions& opt = {});

/// Solutions at every requested eta (any order), from one continuation sweep.
std::vector<DysonState> solveImaginaryAxisPath(const VarianceProfile& S, std::vector<double> etas,
                                               const DysonOptions& opt = {});

/// Solution at z with Im z > 0, continued in Im z from startEta at fixed Re z.
/// Throws NonConvergence, ImaginarySignLost, NonPositiveInput.
DysonState solveUpperHalfPlane(const VarianceProfile& S, Complex z, const DysonOptions& opt = {});

/// Relative defect of the imaginary-axis equation.
double imaginaryAxisDefect(const VarianceProfile& S, double eta, const Eigen::VectorXd& v);
/// Relative defect of the complex equation.
double complexDefect(const VarianceProfile& S, Complex z, const Eigen::VectorXcd& m);

struct DensityCurve {
    std::vector<double> tau;
    std::vector<double> rho;
    double epsilon = 0.0;
};

/// rho(tau) = Im <m(tau + i eps)> / pi, grid points solved in parallel.
DensityCurve densityProfile(const VarianceProfile& S, const std::vector<double>& tauGrid, double epsilon,
                            const DysonOptions& opt = {});
/// Same values computed one point after another.
DensityCurve densityProfileSerial(const VarianceProfile& S, const std::vector<double>& tauGrid, double epsilon,
                                  const DysonOptions& opt = {});

/// J(x) = <x, S x>/2 - <log x> + eta <x>; throws NonPositiveInput.
double variationalValue(const VarianceProfile& S, const Eigen::VectorXd& x, double eta);

/// Geometric grid from hi down to lo with the given number of points per decade (both ends included).
std::vector<double> geometricGrid(double lo, double hi, int pointsPerDecade);

struct ScalingFit {
    std::vector<double> etaGrid;                    ///< decreasing
    std::vector<std::vector<double>> blockAverages; ///< [eta][block], normal-form block order
    std::vector<std::vector<double>> empirical;     ///< -log<v_i>/log eta
    std::vector<double> fittedSlopes;               ///< d log<v_i> / d log eta
    std::vector<Rational> predicted;                ///< f_i
    std::vector<double> deviation;                  ///< fittedSlope_i + f_i
    std::vector<std::vector<double>> blockSpread;   ///< [eta][block] max v / min v inside the block
};

ScalingFit empiricalExponents(const VarianceProfile& S, double etaMin, double etaMax, int pointsPerDecade,
                              const DysonOptions& opt = {});

struct RescaledData {
    NormalForm nf;
    BlockRelation rel;
    IndexExponents exponents;
    Eigen::MatrixXd S0;                  ///< complement blocks, normal-form order
    Eigen::MatrixXd Sgt;                 ///< leading sub-dominant blocks, normal-form order
    std::vector<Rational> h;
    std::vector<IndexList> succSets;     ///< successors with minimal exponent
    Eigen::VectorXd w;                   ///< limit weights (normal-form order), empty until estimated
    std::int64_t Q = 1;
};

RescaledData rescaledProfile(const VarianceProfile& S);

struct LimitWeights {
    Eigen::VectorXd w;           ///< normal-form order
    double mdeResidual = 0.0;    ///< sup |1 - w S0 w|
    std::vector<double> etaUsed;
};

/// Extrapolates eta^f v(eta) to eta = 0 as a polynomial of the given order in
/// omega = eta^(1/Q) through the order + 1 smallest grid values.
LimitWeights limitWeights(const VarianceProfile& S, RescaledData& data, const std::vector<double>& etaGrid,
                          int order = 1, const DysonOptions& opt = {});

struct RescaledResiduals {
    double F0 = 0.0;                 ///< sup norm of the projected leading equation
    std::vector<double> Fl;          ///< one per pair l < M
};

RescaledResiduals rescaledResiduals(const RescaledData& data, const Eigen::VectorXd& w);

struct AtomMass {
    double kappaNumeric = 0.0;
    Rational kappaExact;
    double eta = 0.0;
};

/// eta <v(eta)> at the smallest grid eta; throws HasSupport.
AtomMass atomMassEstimate(const VarianceProfile& S, const std::vector<double>& etaGrid, const DysonOptions& opt = {});

struct Quantile {
    double gamma = 0.0;
    double predictedSlope = 0.0;
};

/// Smallest gamma with integral_0^gamma rho = 1/N (trapezoid rule, linear in
/// the crossing cell); throws GridTooCoarse.
Quantile quantile(const DensityCurve& curve, const Rational& sigma, long long N);

/// Least-squares slope of y against x.
double leastSquaresSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace singdeg
