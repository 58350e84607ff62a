#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/vec.hpp"

namespace fraclab::quad {

/// Full determinism contract: identical (config, integrand) pairs produce
/// bit-identical results.
struct QuadConfig {
    double abs_tol = 1e-9;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;          ///< per 1-D radial integral
    double singular_split_radius = 0.5;  ///< fraction of distance-to-singularity
    long mc_samples = 200000;
    uint64_t seed = 0x00f7ac1ab5eedull;
    double tail_radius = 8.0;            ///< outer truncation before the tail map

    static QuadConfig make(double abs_tol, double rel_tol, int max_subdivisions,
                           double singular_split_radius, long mc_samples, uint64_t seed,
                           double tail_radius);
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = true;
    long evals = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        err_est += o.err_est;
        converged = converged && o.converged;
        evals += o.evals;
        return *this;
    }
};

struct McResult {
    double value = 0.0;
    double std_err = 0.0;
    long samples = 0;
};

/// Adaptive Gauss-Kronrod (7-15) on [a,b] with optional interior breakpoints.
QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_subdivisions,
                        const std::vector<double>& breakpoints = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Graded nodes r_k = r_max (k/K)^{2/(2-gamma_est)} toward the r = 0 endpoint.
std::vector<double> graded_mesh(double r_max, int pieces, double gamma_est);

/// Up to four radial intervals along one direction, plus a grading hint for a
/// segment starting at the polar origin.
struct RaySegments {
    RayInterval seg[4];
    int count = 0;
    void add(const RayInterval& s) {
        if (!s.empty() && s.hi > s.lo) seg[count++] = s;
    }
};

/// Tensor polar integration for N = 2, 3: the value of
///   int f(center + r w) r^{N-1} dr dw
/// over the radial segments supplied per direction. Radial integrals are
/// adaptive; the angular grid doubles until the result settles.
/// gamma_at_zero grades the radial mesh of segments touching r = 0.
QuadResult integrate_polar(int N, const Vec& center, const std::function<double(const Vec&)>& f,
                           const std::function<RaySegments(const Vec&)>& segments,
                           const QuadConfig& cfg, double gamma_at_zero = 0.0,
                           double tail_from = -1.0);

/// Integral of f over the ball B(center, radius). N = 2, 3 use polar product
/// rules centered at a declared interior singular point when there is one;
/// N >= 4 falls back to importance-sampled Monte Carlo.
QuadResult integrate_ball(const ScalarField& f, const Vec& center, double radius,
                          const QuadConfig& cfg);

/// Integral of f over R^N minus a closed ball. The tail [tail_radius, inf) is
/// mapped to a finite interval by r = tail_radius / (1 - tau), so algebraic
/// tails integrate exactly up to quadrature error.
QuadResult integrate_exterior(const ScalarField& f, const Vec& excluded_center,
                              double excluded_radius, const QuadConfig& cfg);

/// Seeded importance-sampled Monte Carlo for double integrals over
/// region x region. Sampling concentrates near the diagonal with radial
/// density ~ |x-y|^{-1-singular_strength} (log-uniform when the strength is
/// not positive). The stream is counter-based: parallel shards reproduce the
/// serial result.
McResult mc_integrate_pairs(const std::function<double(const Vec&, const Vec&)>& g,
                            const Vec& center, double radius, double singular_strength,
                            const QuadConfig& cfg);

}  // namespace fraclab::quad
