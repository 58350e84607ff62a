#include "fraclab/operators.hpp"
#include <cstdio>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraclab/specfun.hpp"

namespace fraclab::ops {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const OperatorRequest& req) {
    if (!(req.order > 0.0 && req.order < 1.0))
        throw std::domain_error("operator order must lie in (0,1)");
    for (const Vec& p : req.field.singular_points)
        if (distance(p, req.eval_point) < 1e-14)
            throw std::domain_error("eval_point coincides with a declared singular point");
    if (!req.field.interior_smooth &&
        !(req.field.holder_exponent > req.order))
        throw std::invalid_argument(
            "field must be interior-smooth or Hoelder with exponent above the order");
}

struct AngularDiff {
    double value = 0.0;
    double scale = 0.0;  ///< magnitude of the field values entering the mean
    int nodes = 0;       ///< angular rule the value settled on
};

/// Angular mean of u on the sphere of radius r about x, minus u(x).
/// Uniform nodes, doubling. The scale lets callers detect when the
/// difference has fallen under summation rounding noise.
AngularDiff angular_mean_diff(const std::function<double(const Vec&)>& u, const Vec& x,
                              double u_at_x, double r, int N, double rel_tol,
                              int fixed_nodes = 0) {
    const int Mmax = 1024;
    double prev = 0.0;
    bool have_prev = false;
    AngularDiff out;
    out.scale = std::abs(u_at_x);
    if (N == 2) {
        double sum = 0.0;
        int M = fixed_nodes > 0 ? fixed_nodes : 16;
        for (int j = 0; j < M; ++j) {
            const double v = u(x + r * unit2(2.0 * kPi * j / M));
            sum += v;
            out.scale = std::max(out.scale, std::abs(v));
        }
        if (fixed_nodes > 0) {
            out.value = sum / M - u_at_x;
            out.nodes = M;
            return out;
        }
        while (true) {
            const double mean = sum / M - u_at_x;
            if (have_prev) {
                const double diff = std::abs(mean - prev);
                if (diff <= std::max(4e-16 * out.scale, 0.25 * rel_tol * std::abs(mean)) ||
                    M >= Mmax) {
                    out.value = mean;
                    out.nodes = M;
                    return out;
                }
            }
            prev = mean;
            have_prev = true;
            // refine: the old nodes are the even-indexed nodes of the doubled grid
            for (int j = 0; j < M; ++j) {
                const double v = u(x + r * unit2(2.0 * kPi * (j + 0.5) / M));
                sum += v;
                out.scale = std::max(out.scale, std::abs(v));
            }
            M *= 2;
        }
    }
    // N == 3: midpoint in the polar angle x uniform azimuth, doubling
    const int L_lo = fixed_nodes > 0 ? fixed_nodes : 8;
    const int L_hi = fixed_nodes > 0 ? fixed_nodes : 64;
    for (int L = L_lo; L <= L_hi; L *= 2) {
        double acc = 0.0, wacc = 0.0;
        for (int i = 0; i < L; ++i) {
            const double phi = kPi * (i + 0.5) / L;
            const double wi = kPi / L * std::sin(phi);
            wacc += wi;
            const double cphi = std::cos(phi), sphi = std::sin(phi);
            double az = 0.0;
            for (int j = 0; j < 2 * L; ++j) {
                const double psi = 2.0 * kPi * (j + 0.5) / (2 * L);
                Vec w{sphi * std::cos(psi), sphi * std::sin(psi), cphi};
                const double v = u(x + r * w);
                az += v;
                out.scale = std::max(out.scale, std::abs(v));
            }
            acc += wi * az / (2 * L);
        }
        const double mean = acc / wacc - u_at_x;
        out.nodes = L;
        if (fixed_nodes > 0 ||
            (have_prev && (std::abs(mean - prev) <= std::max(4e-16 * out.scale,
                                                             0.25 * rel_tol * std::abs(mean)) ||
                           L >= 64))) {
            out.value = mean;
            return out;
        }
        prev = mean;
        have_prev = true;
    }
    out.value = prev;
    return out;
}

/// Angular first moment component: mean over the sphere of w_i u(x + r w),
/// times the sphere measure.
AngularDiff angular_moment(const std::function<double(const Vec&)>& u, const Vec& x, int component,
                           double r, int N, double rel_tol, int fixed_nodes = 0) {
    const int Mmax = 1024;
    double prev = 0.0;
    bool have_prev = false;
    AngularDiff out;
    if (N == 2) {
        double sum = 0.0;
        int M = fixed_nodes > 0 ? fixed_nodes : 16;
        for (int j = 0; j < M; ++j) {
            const Vec w = unit2(2.0 * kPi * j / M);
            const double v = u(x + r * w);
            sum += w[component] * v;
            out.scale = std::max(out.scale, std::abs(v));
        }
        if (fixed_nodes > 0) {
            out.value = sum / M * 2.0 * kPi;
            out.nodes = M;
            return out;
        }
        while (true) {
            const double mom = sum / M * 2.0 * kPi;
            if (have_prev) {
                const double diff = std::abs(mom - prev);
                if (diff <= std::max(4e-15 * out.scale, 0.25 * rel_tol * std::abs(mom)) ||
                    M >= Mmax) {
                    out.value = mom;
                    out.nodes = M;
                    return out;
                }
            }
            prev = mom;
            have_prev = true;
            for (int j = 0; j < M; ++j) {
                const Vec w = unit2(2.0 * kPi * (j + 0.5) / M);
                const double v = u(x + r * w);
                sum += w[component] * v;
                out.scale = std::max(out.scale, std::abs(v));
            }
            M *= 2;
        }
    }
    const int L_lo = fixed_nodes > 0 ? fixed_nodes : 8;
    const int L_hi = fixed_nodes > 0 ? fixed_nodes : 64;
    for (int L = L_lo; L <= L_hi; L *= 2) {
        double acc = 0.0;
        for (int i = 0; i < L; ++i) {
            const double ui = std::cos(kPi * (i + 0.5) / L);
            const double wi = kPi / L * std::sin(kPi * (i + 0.5) / L);
            const double sphi = std::sqrt(std::max(0.0, 1.0 - ui * ui));
            for (int j = 0; j < 2 * L; ++j) {
                const double psi = 2.0 * kPi * (j + 0.5) / (2 * L);
                Vec w{sphi * std::cos(psi), sphi * std::sin(psi), ui};
                const double v = u(x + r * w);
                acc += wi * (2.0 * kPi / (2 * L)) * w[component] * v;
                out.scale = std::max(out.scale, std::abs(v));
            }
        }
        out.nodes = L;
        if (fixed_nodes > 0 ||
            (have_prev && (std::abs(acc - prev) <= std::max(4e-15 * out.scale,
                                                            0.25 * rel_tol * std::abs(acc)) ||
                           L >= 64))) {
            out.value = acc;
            return out;
        }
        prev = acc;
        have_prev = true;
    }
    out.value = prev;
    return out;
}

/// Geometric-dyadic radial integration of g over (0, rho]. The probe reports
/// the angular difference driving g at a representative radius of each
/// level: once it falls under summation rounding noise the descent stops
/// with an explicit error bound, so the noise is never amplified by the
/// r^{-1-order} weight. Levels also stop early when contributions are
/// negligible and decaying, with a geometric-tail extrapolation.
quad::QuadResult dyadic_levels(const std::function<double(double, int)>& g,
                               const std::function<AngularDiff(double)>& probe, double rho,
                               double order, const quad::QuadConfig& cfg) {
    quad::QuadResult out;
    const double sigma_like = 2.0 * kPi;  // weight scale of the angular factor
    double prev_level = 0.0;
    double probe_hist[4] = {0, 0, 0, 0};
    int decaying = 0, below_noise = 0;
    const int kMaxLevels = 48;
    for (int k = 0; k < kMaxLevels; ++k) {
        const double b = rho * std::pow(0.5, k);
        const double a = 0.5 * b;
        const AngularDiff pr = probe(0.71 * b);
        const double noise = 4e-15 * pr.scale;
        // stop descending once the angular difference disappears into
        // summation rounding noise (absolute floor), or stops decaying at
        // all (stagnation: genuine differences shrink level over level)
        const bool stagnant = k >= 4 && std::abs(pr.value) >= 0.9 * probe_hist[k % 4] &&
                              probe_hist[k % 4] > 0.0;
        if (std::abs(pr.value) <= noise || stagnant) {
            if (++below_noise >= 2) {
                // bound the abandoned mass assuming no worse than linear
                // decay of the true difference below this scale
                const double cap = std::max(noise, std::abs(pr.value));
                out.err_est += sigma_like * cap * std::pow(a, -order) / (1.0 - order);
                return out;
            }
        } else {
            below_noise = 0;
        }
        probe_hist[k % 4] = std::abs(pr.value);
        // the probe's settled angular rule (doubled) holds across the level,
        // keeping the radial integrand smooth in r
        const int level_nodes = std::min(2048, 2 * std::max(pr.nodes, 16));
        auto g_level = [&g, level_nodes](double r) { return g(r, level_nodes); };
        // the level cannot be resolved below its own rounding-noise mass
        const double lvl_noise =
            sigma_like * (2e-16 * pr.scale) * std::pow(a, -order) / std::max(order, 0.05);
        quad::QuadResult lvl =
            quad::integrate_1d(g_level, a, b, std::max(0.05 * cfg.abs_tol, 8.0 * lvl_noise),
                               0.5 * cfg.rel_tol, 60);
        out.value += lvl.value;
        out.err_est += lvl.err_est;
        out.evals += lvl.evals;
        out.converged = out.converged && lvl.converged;
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));
        if (k > 2 && std::abs(lvl.value) <= std::abs(prev_level)) ++decaying; else decaying = 0;
        if (decaying >= 2 && std::abs(lvl.value) < 0.02 * tol) {
            // geometric remainder from the observed decay ratio
            const double q = (std::abs(prev_level) > 0.0)
                                 ? std::clamp(std::abs(lvl.value / prev_level), 0.0, 0.75)
                                 : 0.0;
            const double rem = std::abs(lvl.value) * q / (1.0 - q);
            out.err_est += rem + std::abs(lvl.value);
            return out;
        }
        prev_level = lvl.value;
    }
    out.converged = false;
    return out;
}

struct FarFieldSetup {
    std::function<quad::RaySegments(const Vec&)> segments;
    bool empty = false;
};

/// Radial segments for the far region {r >= rho} intersected with the field
/// support (rays emanate from x).
FarFieldSetup far_segments(const ScalarField& f, const Vec& x, double rho) {
    FarFieldSetup s;
    const bool clip = std::isfinite(f.support_radius);
    const double supp = f.support_radius;
    const Vec origin = Vec::zero(x.dim);
    if (clip && x.norm() >= supp + rho) {
        // evaluation point detached from the support: no inner cutoff needed
        s.segments = [=](const Vec& w) {
            quad::RaySegments seg;
            seg.add(ray_ball_intersection(x, w, origin, supp));
            return seg;
        };
        return s;
    }
    s.segments = [=](const Vec& w) {
        quad::RaySegments seg;
        RayInterval base{rho, std::numeric_limits<double>::infinity()};
        if (clip) {
            const RayInterval sb = ray_ball_intersection(x, w, origin, supp);
            if (sb.empty()) return seg;
            base.lo = std::max(base.lo, sb.lo);
            base.hi = std::min(base.hi, sb.hi);
        }
        seg.add(base);
        return seg;
    };
    return s;
}

}  // namespace

double kernel_norm_const(int N, double order) {
    // kernel |x-y|^{-(N+order)} belongs to the operator of order `order/2`
    return specfun::norm_const_laplacian(N, 0.5 * order);
}

namespace detail {

double near_field_radius(const ScalarField& f, const Vec& x, const quad::QuadConfig& cfg,
                         double domain_cap) {
    double cap = domain_cap > 0.0 ? domain_cap : 1.0;
    if (std::isfinite(f.support_radius)) {
        const double d_supp = f.support_radius - x.norm();
        if (d_supp > 0.0) cap = std::min(cap, d_supp);
    }
    for (const Vec& p : f.singular_points) cap = std::min(cap, distance(p, x));
    return cfg.singular_split_radius * cap;
}

quad::QuadResult near_field_symmetric(const std::function<double(const Vec&)>& u, const Vec& x,
                                      double u_at_x, double rho, double order,
                                      const quad::QuadConfig& cfg) {
    const int N = x.dim;
    const double sigma = specfun::sphere_measure(N);
    auto g = [&](double r, int nodes) {
        return -sigma * std::pow(r, -1.0 - order) *
               angular_mean_diff(u, x, u_at_x, r, N, cfg.rel_tol, nodes).value;
    };
    auto probe = [&](double r) { return angular_mean_diff(u, x, u_at_x, r, N, cfg.rel_tol); };
    return dyadic_levels(g, probe, rho, order, cfg);
}

quad::QuadResult near_field_moment(const std::function<double(const Vec&)>& u, const Vec& x,
                                   int component, double rho, double order,
                                   const quad::QuadConfig& cfg) {
    const int N = x.dim;
    auto g = [&](double r, int nodes) {
        return std::pow(r, -1.0 - order) *
               angular_moment(u, x, component, r, N, cfg.rel_tol, nodes).value;
    };
    auto probe = [&](double r) { return angular_moment(u, x, component, r, N, cfg.rel_tol); };
    return dyadic_levels(g, probe, rho, order, cfg);
}

}  // namespace detail

OperatorResult frac_laplacian_pv(const OperatorRequest& req) {
    validate(req);
    const int N = req.eval_point.dim;
    const double order = req.order;
    const double A = kernel_norm_const(N, order);
    const double sigma = specfun::sphere_measure(N);
    const Vec& x = req.eval_point;
    const double ux = req.field(x);
    auto u = [&req](const Vec& y) { return req.field(y); };

    OperatorResult out;
    const bool detached = std::isfinite(req.field.support_radius) &&
                          x.norm() >= req.field.support_radius * (1.0 + 1e-12);

    double rho = 0.0;
    quad::QuadResult near;
    if (!detached) {
        rho = detail::near_field_radius(req.field, x, req.cfg, 0.0);
        near = detail::near_field_symmetric(u, x, ux, rho, order, req.cfg);
    }

    // far field: u(x) * kernel mass of {r > rho}  minus  int u(y) K dy
    auto far_setup = far_segments(req.field, x, rho);
    auto integrand = [&](const Vec& y) {
        const double r = distance(x, y);
        return u(y) * std::pow(r, -static_cast<double>(N) - order);
    };
    quad::QuadResult far = quad::integrate_polar(N, x, integrand, far_setup.segments, req.cfg);

    double mass_outside = 0.0;
    if (!detached) mass_outside = sigma * std::pow(rho, -order) / order;
    // detached case: u == 0 near x, kernel mass times u(x)=0 contributes nothing

    out.value = A * (ux * mass_outside - far.value + near.value);
    out.err_est = A * (far.err_est + near.err_est);
    out.converged = far.converged && near.converged;
    return out;
}

OperatorResult regional_frac_laplacian(const OperatorRequest& req) {
    validate(req);
    const int N = req.eval_point.dim;
    const Vec& x = req.eval_point;
    const double delta = req.domain.delta(x);
    if (!(delta > 0.0))
        throw std::domain_error("regional_frac_laplacian: eval_point must be interior");
    const double order = req.order;
    const double A = kernel_norm_const(N, order);
    const double ux = req.field(x);
    auto u = [&req](const Vec& y) { return req.field(y); };

    const double rho = detail::near_field_radius(req.field, x, req.cfg, delta);
    quad::QuadResult near = detail::near_field_symmetric(u, x, ux, rho, order, req.cfg);

    const BallGeometry dom = req.domain;
    auto segments = [=](const Vec& w) {
        quad::RaySegments seg;
        RayInterval dm = ray_ball_intersection(x, w, dom.center, dom.radius);
        if (!dm.empty()) seg.add({std::max(rho, dm.lo), dm.hi});
        return seg;
    };
    auto integrand = [&](const Vec& y) {
        const double r = distance(x, y);
        return (ux - u(y)) * std::pow(r, -static_cast<double>(N) - order);
    };
    quad::QuadResult far = quad::integrate_polar(N, x, integrand, segments, req.cfg);

    OperatorResult out;
    out.value = A * (far.value + near.value);
    out.err_est = A * (far.err_est + near.err_est);
    out.converged = far.converged && near.converged;
    return out;
}

quad::QuadResult complement_geometric(const Vec& x, double order, const BallGeometry& domain,
                                      const quad::QuadConfig& cfg) {
    const int N = x.dim;
    ScalarField kern;
    kern.eval = [x, N, order](const Vec& z) {
        return std::pow(distance(x, z), -static_cast<double>(N) - order);
    };
    kern.singular_points = {x};
    kern.decay_exponent = order;
    return quad::integrate_exterior(kern, domain.center, domain.radius, cfg);
}

OperatorResult complement_term(const OperatorRequest& req) {
    validate(req);
    const int N = req.eval_point.dim;
    if (!(req.domain.delta(req.eval_point) > 0.0))
        throw std::domain_error("complement_term: eval_point must be interior");
    const double A = kernel_norm_const(N, req.order);
    const double ux = req.field(req.eval_point);
    OperatorResult out;
    if (ux == 0.0) return out;
    quad::QuadResult geo = complement_geometric(req.eval_point, req.order, req.domain, req.cfg);
    out.value = A * ux * geo.value;
    out.err_est = std::abs(A * ux) * geo.err_est;
    out.converged = geo.converged;
    return out;
}

GradientResult riesz_gradient(const OperatorRequest& req) {
    validate(req);
    const int N = req.eval_point.dim;
    const double order = req.order;
    const double mu = specfun::norm_const_gradient(N, order);
    const Vec& x = req.eval_point;
    auto u = [&req](const Vec& y) { return req.field(y); };

    GradientResult out;
    out.value = Vec::zero(N);
    const bool detached = std::isfinite(req.field.support_radius) &&
                          x.norm() >= req.field.support_radius * (1.0 + 1e-12);
    double rho = 0.0;
    if (!detached) rho = detail::near_field_radius(req.field, x, req.cfg, 0.0);

    auto far_setup = far_segments(req.field, x, rho);
    for (int i = 0; i < N; ++i) {
        quad::QuadResult near;
        if (!detached) near = detail::near_field_moment(u, x, i, rho, order, req.cfg);
        auto integrand = [&](const Vec& y) {
            const double r = distance(x, y);
            return u(y) * (y[i] - x[i]) * std::pow(r, -static_cast<double>(N) - order - 1.0);
        };
        quad::QuadResult far = quad::integrate_polar(N, x, integrand, far_setup.segments, req.cfg);
        out.value[i] = mu * (near.value + far.value);
        out.err_est += mu * (near.err_est + far.err_est);
        out.converged = out.converged && near.converged && far.converged;
    }
    return out;
}

}  // namespace fraclab::ops
