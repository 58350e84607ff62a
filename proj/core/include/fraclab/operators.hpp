#pragma once

#include <functional>

#include "fraclab/field.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/vec.hpp"

namespace fraclab::ops {

/// A pointwise nonlocal-operator evaluation. `order` is the t of
/// (-Delta)^{t/2} or of the Riesz t-gradient, in (0,1); the singular kernel
/// is |x-y|^{-(N+order)} (resp. (x-y)|x-y|^{-(N+order+1)}).
struct OperatorRequest {
    ScalarField field;
    double order = 0.5;
    Vec eval_point;
    quad::QuadConfig cfg;
    BallGeometry domain{2};  ///< for the regional/complement variants
};

struct OperatorResult {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = true;
};

struct GradientResult {
    Vec value;
    double err_est = 0.0;
    bool converged = true;
};

/// Full-space principal-value fractional Laplacian, normalization constant
/// included. The ball B_rho(x) contribution is evaluated through the
/// symmetrized second difference, which removes the principal value; rho is
/// capped so the symmetric difference never crosses the support boundary
/// or reaches a declared singular point.
OperatorResult frac_laplacian_pv(const OperatorRequest& req);

/// Principal-value integral restricted to the domain ball.
OperatorResult regional_frac_laplacian(const OperatorRequest& req);

/// field(x) times the kernel mass of the domain complement,
/// a_{N} * field(x) * int_{domain^c} |x-z|^{-N-order} dz.
OperatorResult complement_term(const OperatorRequest& req);

/// The kernel mass of the complement alone (no field factor, no constant).
quad::QuadResult complement_geometric(const Vec& x, double order, const BallGeometry& domain,
                                      const quad::QuadConfig& cfg);

/// Riesz fractional gradient of the given order (componentwise PV with the
/// same near-field symmetrization; the odd kernel makes the centered term
/// drop out exactly).
GradientResult riesz_gradient(const OperatorRequest& req);

/// Normalization constant of the operator whose kernel is
/// |x-y|^{-(N+order)}; chosen so closed-form cross-checks hold exactly.
double kernel_norm_const(int N, double order);

namespace detail {

/// -sigma_N int_0^rho r^{-1-order} (angular mean of u about x minus u(x)) dr,
/// by geometric dyadic levels with a tail extrapolation.
quad::QuadResult near_field_symmetric(const std::function<double(const Vec&)>& u, const Vec& x,
                                      double u_at_x, double rho, double order,
                                      const quad::QuadConfig& cfg);

/// int_0^rho r^{-1-order} int_{S^{N-1}} w_i u(x + r w) dw dr (component i of
/// the gradient kernel's inner part).
quad::QuadResult near_field_moment(const std::function<double(const Vec&)>& u, const Vec& x,
                                   int component, double rho, double order,
                                   const quad::QuadConfig& cfg);

/// Largest admissible symmetrization radius about x for the given field.
double near_field_radius(const ScalarField& f, const Vec& x, const quad::QuadConfig& cfg,
                         double domain_cap);

}  // namespace detail

}  // namespace fraclab::ops
