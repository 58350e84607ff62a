#include "fraclab/torsion.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab::torsion {

using specfun::gamma_signed;
using specfun::gauss_2f1;
using specfun::gauss_2f1_near_unit;
using specfun::ln_gamma;

TorsionClosedForm::TorsionClosedForm(const specfun::FracParams& params) : params_(params) {
    const double N = params_.N, s = params_.s;
    prefactor_ = std::exp(-2.0 * s * std::log(2.0) + ln_gamma(0.5 * N) -
                          ln_gamma(0.5 * N + s) - ln_gamma(1.0 + s));
    // Pin the sign at t = 2s: there the hypergeometric factor is exactly 1
    // and the s-Laplacian of the solution must equal +1 inside the ball.
    const double t_pin = 2.0 * s;
    const double value_unsigned =
        std::exp((t_pin - 2.0 * s) * std::log(2.0) + ln_gamma(0.5 * (N + t_pin)) -
                 ln_gamma(0.5 * N + s) - ln_gamma(s + 1.0 - 0.5 * t_pin));
    sign_ = (value_unsigned > 0.0) ? +1 : -1;
}

double TorsionClosedForm::flap_prefactor(double t) const {
    const double N = params_.N, s = params_.s;
    return std::exp((t - 2.0 * s) * std::log(2.0) + ln_gamma(0.5 * (N + t)) -
                    ln_gamma(0.5 * N + s) - ln_gamma(s + 1.0 - 0.5 * t));
}

double TorsionClosedForm::solution(const Vec& x) const {
    const double r2 = x.norm2();
    if (r2 >= 1.0) return 0.0;
    return prefactor_ * std::pow(1.0 - r2, params_.s);
}

double TorsionClosedForm::frac_laplacian_closed(double t, const Vec& x) const {
    const double r2 = x.norm2();
    if (r2 >= 1.0)
        throw std::domain_error("frac_laplacian_closed: the formula is interior-only");
    return frac_laplacian_closed_w(t, 1.0 - r2);
}

double TorsionClosedForm::frac_laplacian_closed_w(double t, double w) const {
    if (!(t > 0.0 && t < 2.0)) throw std::domain_error("frac_laplacian_closed: t must lie in (0,2)");
    if (!(w > 0.0 && w <= 1.0)) throw std::domain_error("frac_laplacian_closed: need 0 < 1-|x|^2 <= 1");
    const double N = params_.N, s = params_.s;
    const double a = 0.5 * (t + N), b = -s + 0.5 * t, c = 0.5 * N;
    const double F = (w <= 0.5) ? gauss_2f1_near_unit(a, b, c, w) : gauss_2f1(a, b, c, 1.0 - w);
    return sign_ * flap_prefactor(t) * F;
}

TorsionClosedForm::BoundaryRate TorsionClosedForm::boundary_rate(double t) const {
    const double N = params_.N, s = params_.s;
    if (t < s)
        throw std::domain_error("boundary_rate: only t >= s is covered by the stated limits");
    if (!(t < params_.t_sup()))
        throw std::domain_error("boundary_rate: t must lie in [s, min{1,2s})");
    BoundaryRate out;
    if (t == s) {
        out.rate_exponent = 0.0;
        out.log_flag = true;
        // limit of the hypergeometric factor against -log(1-|x|^2)
        const double ratio =
            std::exp(ln_gamma(0.5 * N)) / (std::exp(ln_gamma(0.5 * (N + s))) * gamma_signed(-0.5 * s));
        out.limit_constant = sign_ * flap_prefactor(t) * ratio;
        return out;
    }
    out.rate_exponent = s - t;
    out.log_flag = false;
    const double ratio = std::exp(ln_gamma(0.5 * N) + ln_gamma(t - s)) /
                         (std::exp(ln_gamma(0.5 * (N + t))) * gamma_signed(-s + 0.5 * t));
    out.limit_constant = sign_ * flap_prefactor(t) * ratio;
    return out;
}

ScalarField TorsionClosedForm::as_field() const {
    ScalarField f;
    const double pf = prefactor_, s = params_.s;
    f.eval = [pf, s](const Vec& x) {
        const double r2 = x.norm2();
        return (r2 < 1.0) ? pf * std::pow(1.0 - r2, s) : 0.0;
    };
    f.support_radius = 1.0;
    f.interior_smooth = true;
    f.holder_exponent = s;
    f.radial = true;
    return f;
}

IntegrabilityClass integrability_class(const specfun::FracParams& params, double t, double p) {
    if (!(t > 0.0 && t < params.t_sup()))
        throw std::domain_error("integrability_class: t must lie in (0, min{1,2s})");
    if (!(p >= 1.0)) throw std::domain_error("integrability_class: p must be >= 1");
    const double s = params.s;
    const bool p_inf = std::isinf(p);
    if (t < s) return IntegrabilityClass::FiniteOnRN;
    if (t == s)
        return p_inf ? IntegrabilityClass::FiniteOnRN_NotLinfty : IntegrabilityClass::FiniteOnRN;
    const double p_threshold = 1.0 / (t - s);
    // the endpoint itself already fails on the ball
    if (!p_inf && p < p_threshold * (1.0 - 1e-12)) return IntegrabilityClass::FiniteOnRN;
    return IntegrabilityClass::InfiniteOnBall;
}

}  // namespace fraclab::torsion
