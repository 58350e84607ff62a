#pragma once

#include <cstdint>
#include <vector>

#include "fraclab/quadrature.hpp"
#include "fraclab/report.hpp"

namespace fraclab::estimates {

/// Two-weight singular integral over a ball,
///   I(d) = int_{B_rho(0)} |x-z|^{-alpha} |y-z|^{-beta} dz,
/// with x = -y on the first axis and d = |x-y| swept over a geometric
/// sequence. The growth in d classifies as bounded (N-alpha-beta > 0),
/// logarithmic (= 0) or power with exponent N-alpha-beta (< 0).
RegimeReport grzywny_scan(int N, double alpha, double beta, double rho,
                          const std::vector<double>& separations, const quad::QuadConfig& cfg);

/// Single evaluation of the two-weight integral (exposed for the swap
///-invariance property).
quad::QuadResult grzywny_integral(int N, double alpha, double beta, double rho, const Vec& x,
                                  const Vec& y, const quad::QuadConfig& cfg);

/// Distance-weighted integral over the unit ball,
///   I(x) = int_{B_1} |x-y|^{lambda-N} delta(y)^{-a} dy,
/// with x walking toward the boundary along a fixed ray. Regimes: bounded
/// (lambda > a), |log delta| (lambda = a), delta^{lambda-a} (lambda < a).
RegimeReport tobias_scan(double lambda, double a, const std::vector<double>& deltas,
                         const quad::QuadConfig& cfg, int N = 2);

quad::QuadResult tobias_integral(int N, double lambda, double a, const Vec& x,
                                 const quad::QuadConfig& cfg);

/// Randomized verification of the elementary inequality
///   | |u|^l - |w|^l |  <=  l max{1, 2^{l-2}} (|u-w|^{l-1} + |u|^{l-1}) |u-w|
/// for vectors u, w and l > 1. Reports the worst LHS/RHS ratio (must not
/// exceed 1 up to rounding).
struct MvtReport {
    bool pass = false;
    double worst_ratio = 0.0;
    long violations = 0;
    long samples = 0;
};
MvtReport mvt_check(long sample_count, int dim, double lambda_lo, double lambda_hi,
                    uint64_t seed);

}  // namespace fraclab::estimates
