#pragma once

#include "fraclab/field.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/vec.hpp"

namespace fraclab::torsion {

/// Integrability of the order-t/2 fractional Laplacian of the torsion
/// solution in L^p.
enum class IntegrabilityClass {
    FiniteOnRN,           ///< finite on all of R^N
    FiniteOnRN_NotLinfty, ///< finite in every L^p, p < inf, but unbounded
    InfiniteOnBall,       ///< already infinite on the unit ball
};

/// Closed forms for the constant-data problem on the unit ball: the solution
/// c_{N,s} (1-|x|^2)^s, its t/2-Laplacian through the hypergeometric
/// representation, and the boundary asymptotics of the latter.
///
/// The hypergeometric representation is trusted only up to sign; the sign is
/// pinned at construction by the t = 2s consistency identity (the solution's
/// s-Laplacian is identically 1 inside the ball, and -s + t/2 = 0 makes the
/// hypergeometric factor 1), and confirmed against principal-value
/// quadrature in the test suite.
class TorsionClosedForm {
public:
    explicit TorsionClosedForm(const specfun::FracParams& params);

    const specfun::FracParams& params() const { return params_; }
    double prefactor() const { return prefactor_; }
    int sign_convention() const { return sign_; }

    /// The Gamma-ratio in front of the hypergeometric factor for order t.
    double flap_prefactor(double t) const;

    /// Solution value: prefactor * (1-|x|^2)^s inside the unit ball, 0 outside.
    double solution(const Vec& x) const;

    /// (-Delta)^{t/2} of the solution at an interior point, t in (0,2),
    /// via the hypergeometric closed form (argument |x|^2).
    double frac_laplacian_closed(double t, const Vec& x) const;

    /// Same, parametrized by w = 1 - |x|^2 to avoid cancellation against the
    /// boundary. Requires w in (0, 1].
    double frac_laplacian_closed_w(double t, double w) const;

    /// Boundary behaviour of frac_laplacian_closed as |x| -> 1^-:
    ///   t > s: value * (1-|x|^2)^{t-s} -> limit_constant  (rate_exponent s-t)
    ///   t = s: value / (-log(1-|x|^2)) -> limit_constant  (log_flag set)
    /// The limit constant includes the prefactor and the resolved sign, so it
    /// is the actual limit of the stated product.
    struct BoundaryRate {
        double rate_exponent = 0.0;
        bool log_flag = false;
        double limit_constant = 0.0;
    };
    BoundaryRate boundary_rate(double t) const;

    /// The solution as a ScalarField (support = closed unit ball).
    ScalarField as_field() const;

private:
    specfun::FracParams params_;
    double prefactor_;
    int sign_;
};

/// L^p classification of (-Delta)^{t/2} of the torsion solution:
///   t < s: finite on R^N for every p up to infinity;
///   t = s: finite for all finite p, unbounded on the ball;
///   t > s: finite iff p < 1/(t-s), infinite on the ball at and above it.
IntegrabilityClass integrability_class(const specfun::FracParams& params, double t, double p);

}  // namespace fraclab::torsion
