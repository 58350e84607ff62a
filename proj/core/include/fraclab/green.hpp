#pragma once

#include <cstdint>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/report.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/vec.hpp"

namespace fraclab::green {

/// The kernel of the solution map of the order-s Dirichlet problem on the
/// unit ball,
///   G(x,y) = kappa(N,s) |x-y|^{2s-N} Phi(r0),
///   r0 = (1-|x|^2)(1-|y|^2)/|x-y|^2,
///   Phi(r0) = int_0^{r0} r^{s-1} (1+r)^{-N/2} dr.
/// The profile Phi is tabulated once (cubic Hermite in log r0 with exact
/// slopes) and validated against adaptive quadrature; series expansions
/// cover both ends of the table.
class GreenKernel {
public:
    GreenKernel(const specfun::FracParams& params, BallGeometry geometry = BallGeometry(2));

    const specfun::FracParams& params() const { return params_; }
    const BallGeometry& geometry() const { return geo_; }
    double normalization() const { return kappa_; }

    /// Kernel value; symmetric and nonnegative, zero if either argument is
    /// outside the open ball. Throws on x == y.
    double value(const Vec& x, const Vec& y) const;

    /// Gradient in the first argument (analytic differentiation of the
    /// closed form). Requires both points inside and x != y.
    Vec gradient_x(const Vec& x, const Vec& y) const;

    /// Profile integral Phi (exposed for validation).
    double profile(double r0) const;
    double profile_direct(double r0, const quad::QuadConfig& cfg) const;

    /// The kernel slice y -> G(x0, y) as a ScalarField.
    ScalarField slice(const Vec& x0) const;

private:
    specfun::FracParams params_;
    BallGeometry geo_;
    double kappa_;
    double phi_inf_;
    // Hermite table of Phi over log r0
    double lv_lo_, lv_hi_, dlv_;
    std::vector<double> tab_val_;
    std::vector<double> tab_slope_;
    void build_table();
};

/// Deterministic pair sample stratified by the boundary-distance decade of x
/// and the separation decade of |x-y|; low-discrepancy within strata.
/// Doubling the count extends the sequence (prefixes are nested).
std::vector<std::pair<Vec, Vec>> sample_pairs_stratified(const BallGeometry& geo, int count,
                                                         uint64_t seed, double delta_min = 1e-3,
                                                         double sep_min = 1e-3);

/// sup over sampled pairs of G / min{|x-y|^{2s-N}, d(x)^s |x-y|^{s-N},
/// d(y)^s |x-y|^{s-N}} and of |grad_x G| / (G max{1/|x-y|, 1/d(x)}), with
/// analytic-vs-central-difference gradient verification.
struct KernelBoundReport {
    EstimateReport upper_bound;    ///< the kernel upper bound constant
    EstimateReport gradient_bound; ///< the gradient bound constant (vs N)
    double max_gradient_mismatch = 0.0;  ///< analytic vs finite differences
    bool gradient_ok = false;
};
KernelBoundReport kernel_bound_check(const GreenKernel& k, int pair_count, uint64_t seed);

/// (-Delta)^{t/2} in x of G(.,y), decomposed as complement term plus
/// regional term; the kernel singularity at y is excised on a ball of
/// radius |x-y|/2 and integrated directly. Interior x.
quad::QuadResult frac_laplacian_of_kernel(const GreenKernel& k, double t, const Vec& x,
                                          const Vec& y, const quad::QuadConfig& cfg,
                                          double r_min = 1e-3);

/// Same operator for x strictly outside the closed ball, where it reduces to
/// -a int_Omega G(z,y) |x-z|^{-N-t} dz (returned in absolute value).
quad::QuadResult frac_laplacian_of_kernel_exterior(const GreenKernel& k, double t, const Vec& x,
                                                   const Vec& y, const quad::QuadConfig& cfg);

/// Riesz t-gradient in x of G(.,y), same decomposition (vector-valued).
struct KernelGradientResult {
    Vec value;
    double err_est = 0.0;
    bool converged = true;
};
KernelGradientResult riesz_gradient_of_kernel(const GreenKernel& k, double t, const Vec& x,
                                              const Vec& y, const quad::QuadConfig& cfg,
                                              double r_min = 1e-3);

/// sup-ratio scan of |(-Delta)^{t/2}_x G| against
///   |x-y|^{-(N-(2s-t))} ( |log|x-y|| + |log d(x)| + |x-y|^{t-s} d(x)^{s-t} )
/// over stratified pairs, with the doubling-stability diagnostic.
EstimateReport interior_bound_check(const GreenKernel& k, double t, int pair_count, uint64_t seed,
                                    const quad::QuadConfig& cfg, int threads = 1);

/// Same scan for the Riesz t-gradient of the kernel.
EstimateReport gradient_bound_check(const GreenKernel& k, double t, int pair_count, uint64_t seed,
                                    const quad::QuadConfig& cfg, int threads = 1);

/// Exterior estimates: near regime (x between the ball and the enclosing
/// sphere) against |x-y|^{2s-N} (|x-y|^{-t} + d(x)^{-t}); far regime against
/// (1+|x|)^{-N-t}, including the log-log decay-slope fit over |x| in [5,50].
struct ExteriorReport {
    EstimateReport near_regime;
    EstimateReport far_regime;
    LineFit far_decay_fit;  ///< slope target: -(N+t)
};
ExteriorReport exterior_check(const GreenKernel& k, double t, int sample_count, uint64_t seed,
                              const quad::QuadConfig& cfg, int threads = 1);

}  // namespace fraclab::green
