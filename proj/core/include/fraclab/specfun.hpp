#pragma once

#include <limits>

namespace fraclab::specfun {

/// Parameter record consumed by every fractional-order computation.
///
/// N    spatial dimension (>= 2)
/// s    order of the operator defining the problem, in (0,1)
/// t    derivative order probed by the harness, in (0, min{1,2s})
/// m    integrability of the data, in [1, inf]
/// eps_star  the epsilon entering the low-summability threshold m_star
struct FracParams {
    int N = 2;
    double s = 0.5;
    double t = 0.5;
    double m = std::numeric_limits<double>::infinity();
    double eps_star = 1e-3;

    /// Validates every invariant; throws std::domain_error naming the
    /// violated one.
    static FracParams make(int N, double s, double t,
                           double m = std::numeric_limits<double>::infinity(),
                           double eps_star = 1e-3);

    double t_sup() const;  ///< min{1, 2s}, the admissible supremum for t
};

/// log Gamma(x) for x > 0. Relative error below 1e-13 on [1e-3, 170].
double ln_gamma(double x);

/// Gamma(x) for any non-pole x, sign included (reflection below zero).
double gamma_signed(double x);

/// Digamma psi(x) for non-pole x.
double digamma(double x);

/// Gauss hypergeometric 2F1(a,b;c;z) on z in [0,1).
///
/// Power series for z <= 1/2, the z -> 1-z connection formula above, with
/// the logarithmic variant when c-a-b is within 1e-9 of an integer.
/// Terminating cases (a or b a nonpositive integer) are summed exactly.
double gauss_2f1(double a, double b, double c, double z);

/// 2F1 with the gap to z = 1 supplied directly (w = 1-z in (0, 1/2]), so
/// boundary evaluations suffer no cancellation in forming 1-z.
double gauss_2f1_near_unit(double a, double b, double c, double w);

/// Normalization constant of the fractional Laplacian of the given order:
/// 2^(2*order) * order * pi^(-N/2) * Gamma(N/2+order) / Gamma(1-order).
double norm_const_laplacian(int N, double order);

/// Normalization constant of the Riesz fractional gradient of the given
/// order: 2^order * pi^(-N/2) * Gamma((N+order+1)/2) / Gamma((1-order)/2).
double norm_const_gradient(int N, double order);

/// Surface measure of the unit sphere in R^N: 2 pi^(N/2) / Gamma(N/2).
double sphere_measure(int N);

}  // namespace fraclab::specfun
