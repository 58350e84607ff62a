#include "fraclab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fraclab/rng.hpp"
#include "fraclab/report.hpp"

namespace fraclab::estimates {

namespace {

/// Rescaled two-weight integrand geometry: after z = d zeta the singular
/// points sit at +-e1/2 and the domain grows to B_{rho/d}. Zone A covers
/// B_2 (both singularities, O(1) geometry), zone B the annulus out to the
/// rescaled domain radius.
quad::QuadResult two_weight_rescaled(int N, double alpha, double beta, double rho_over_d,
                                     const quad::QuadConfig& cfg) {
    Vec xh = Vec::zero(N), yh = Vec::zero(N);
    xh[0] = 0.5;
    yh[0] = -0.5;
    auto f = [=](const Vec& z) {
        return std::pow(distance(xh, z), -alpha) * std::pow(distance(yh, z), -beta);
    };
    const Vec origin = Vec::zero(N);

    quad::QuadResult out;
    // the two singular caps
    for (int piece = 0; piece < 2; ++piece) {
        const Vec c = piece == 0 ? xh : yh;
        const double gamma = piece == 0 ? alpha : beta;
        auto segs = [=](const Vec&) {
            quad::RaySegments s;
            s.add({0.0, 0.25});
            return s;
        };
        out += quad::integrate_polar(N, c, f, segs, cfg, gamma);
    }
    // zone A remainder: B_2 minus the caps, rays from the origin
    {
        auto segs = [=](const Vec& w) {
            quad::RaySegments s;
            RayInterval dom{0.0, std::min(2.0, rho_over_d)};
            const RayInterval hx = ray_ball_intersection(origin, w, xh, 0.25);
            const RayInterval hy = ray_ball_intersection(origin, w, yh, 0.25);
            // at most one of the caps intersects a given ray (they are
            // symmetric about the origin and separated)
            RayInterval hole = !hx.empty() ? hx : hy;
            if (!hx.empty() && !hy.empty()) hole = (hx.lo < hy.lo) ? hx : hy;
            if (hole.empty() || hole.lo >= dom.hi) {
                s.add(dom);
                return s;
            }
            s.add({0.0, hole.lo});
            s.add({std::min(hole.hi, dom.hi), dom.hi});
            return s;
        };
        out += quad::integrate_polar(N, origin, f, segs, cfg);
    }
    // zone B: the outer annulus (no singular structure)
    if (rho_over_d > 2.0) {
        auto segs = [=](const Vec&) {
            quad::RaySegments s;
            s.add({2.0, rho_over_d});
            return s;
        };
        out += quad::integrate_polar(N, origin, f, segs, cfg);
    }
    return out;
}

}  // namespace

quad::QuadResult grzywny_integral(int N, double alpha, double beta, double rho, const Vec& x,
                                  const Vec& y, const quad::QuadConfig& cfg) {
    if (!(alpha < N) || !(beta < N))
        throw std::domain_error("grzywny_integral: alpha and beta must be below N");
    ScalarField f;
    f.eval = [x, y, alpha, beta](const Vec& z) {
        return std::pow(distance(x, z), -alpha) * std::pow(distance(y, z), -beta);
    };
    f.singular_points = {x, y};
    f.singular_strength = std::max(alpha, beta);

    // generic evaluation: caps around each singularity, then ray exclusions
    const double d = distance(x, y);
    const double cap = 0.25 * d;
    quad::QuadResult out;
    const Vec c = Vec::zero(N);
    auto fn = [&f](const Vec& z) { return f.eval(z); };
    for (int piece = 0; piece < 2; ++piece) {
        const Vec p = piece == 0 ? x : y;
        const double gamma = piece == 0 ? alpha : beta;
        auto segs = [=](const Vec& w) {
            quad::RaySegments s;
            RayInterval dom = ray_ball_intersection(p, w, c, rho);
            if (dom.empty()) return s;
            s.add({0.0, std::min(cap, dom.hi)});
            return s;
        };
        out += quad::integrate_polar(N, p, fn, segs, cfg, gamma);
    }
    auto segs = [=](const Vec& w) {
        quad::RaySegments s;
        const RayInterval dom = ray_ball_intersection(c, w, c, rho);
        if (dom.empty()) return s;
        const RayInterval hx = ray_ball_intersection(c, w, x, cap);
        const RayInterval hy = ray_ball_intersection(c, w, y, cap);
        double cur = 0.0;
        RayInterval holes[2] = {hx, hy};
        if (!hy.empty() && (hx.empty() || hy.lo < hx.lo)) std::swap(holes[0], holes[1]);
        for (const RayInterval& h : holes) {
            if (h.empty() || h.lo >= dom.hi) continue;
            if (h.lo > cur) s.add({cur, std::min(h.lo, dom.hi)});
            cur = std::max(cur, h.hi);
        }
        if (cur < dom.hi) s.add({cur, dom.hi});
        return s;
    };
    out += quad::integrate_polar(N, c, fn, segs, cfg);
    return out;
}

RegimeReport grzywny_scan(int N, double alpha, double beta, double rho,
                          const std::vector<double>& separations, const quad::QuadConfig& cfg) {
    if (!(alpha < N) || !(beta < N))
        throw std::domain_error("grzywny_scan: alpha and beta must be below N (integrability)");
    const double expo = N - alpha - beta;

    std::vector<double> values;
    values.reserve(separations.size());
    for (double d : separations) {
        quad::QuadResult r = two_weight_rescaled(N, alpha, beta, rho / d, cfg);
        values.push_back(std::pow(d, expo) * r.value);
    }

    RegimeReport rep;
    char meta[128];
    std::snprintf(meta, sizeof meta, "N=%d alpha=%.4g beta=%.4g rho=%.4g n=%zu", N, alpha, beta,
                  rho, separations.size());
    rep.sample_meta = meta;

    // regression window: drop the largest separation decade so the additive
    // O(1) part of the bound does not contaminate the fit
    const double d_max = *std::max_element(separations.begin(), separations.end());
    std::vector<double> fx, fy;
    double vmax = 0, vmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < separations.size(); ++i) {
        vmax = std::max(vmax, values[i]);
        vmin = std::min(vmin, values[i]);
        if (separations[i] > 0.1 * d_max) continue;
        fx.push_back(std::log(separations[i]));
        fy.push_back(values[i]);
    }
    rep.max_min_ratio = vmax / vmin;

    if (std::abs(expo) < 1e-12) {
        // expect linear growth in |log d|
        std::vector<double> lx;
        for (double v : fx) lx.push_back(std::abs(v));
        const LineFit fit = fit_line(lx, fy);
        rep.regime_label = RegimeReport::Label::Logarithmic;
        rep.fitted_exponent = fit.slope;
        rep.fit_r2 = fit.r2;
        rep.empirical_C = fit.slope;
        return rep;
    }
    if (expo > 0.0) {
        rep.regime_label = RegimeReport::Label::Bounded;
        rep.empirical_C = vmax;
        rep.fit_r2 = 1.0;
        rep.fitted_exponent = 0.0;
        return rep;
    }
    std::vector<double> ly;
    ly.reserve(fy.size());
    for (double v : fy) ly.push_back(std::log(v));
    const LineFit fit = fit_line(fx, ly);
    rep.regime_label = RegimeReport::Label::Power;
    rep.fitted_exponent = fit.slope;
    rep.fit_r2 = fit.r2;
    rep.empirical_C = std::exp(fit.intercept);
    return rep;
}

quad::QuadResult tobias_integral(int N, double lambda, double a, const Vec& x,
                                 const quad::QuadConfig& cfg) {
    const Vec origin = Vec::zero(N);
    auto f = [=](const Vec& y) {
        const double dy = 1.0 - y.norm();
        return std::pow(distance(x, y), lambda - N) * std::pow(dy, -a);
    };
    auto segs = [=](const Vec& w) {
        quad::RaySegments s;
        s.add(ray_ball_intersection(x, w, origin, 1.0));
        return s;
    };
    return quad::integrate_polar(N, x, f, segs, cfg, N - lambda);
}

RegimeReport tobias_scan(double lambda, double a, const std::vector<double>& deltas,
                         const quad::QuadConfig& cfg, int N) {
    if (!(lambda > 0.0 && lambda < 1.0 && a > 0.0 && a < 1.0))
        throw std::domain_error("tobias_scan: lambda and a must lie in (0,1)");
    std::vector<double> values;
    values.reserve(deltas.size());
    for (double d : deltas) {
        Vec x = Vec::zero(N);
        x[0] = 1.0 - d;
        values.push_back(tobias_integral(N, lambda, a, x, cfg).value);
    }

    RegimeReport rep;
    char meta[128];
    std::snprintf(meta, sizeof meta, "N=%d lambda=%.4g a=%.4g n=%zu", N, lambda, a, deltas.size());
    rep.sample_meta = meta;

    const double d_max = *std::max_element(deltas.begin(), deltas.end());
    std::vector<double> fx, fy;
    double vmax = 0, vmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < deltas.size(); ++i) {
        vmax = std::max(vmax, values[i]);
        vmin = std::min(vmin, values[i]);
        if (deltas[i] > 0.1 * d_max) continue;
        fx.push_back(std::log(deltas[i]));
        fy.push_back(values[i]);
    }
    rep.max_min_ratio = vmax / vmin;

    if (lambda > a) {
        rep.regime_label = RegimeReport::Label::Bounded;
        rep.empirical_C = vmax;
        rep.fit_r2 = 1.0;
        return rep;
    }
    if (lambda == a) {
        std::vector<double> lx;
        for (double v : fx) lx.push_back(std::abs(v));
        const LineFit fit = fit_line(lx, fy);
        rep.regime_label = RegimeReport::Label::Logarithmic;
        rep.fitted_exponent = fit.slope;
        rep.fit_r2 = fit.r2;
        rep.empirical_C = fit.slope;
        return rep;
    }
    std::vector<double> ly;
    for (double v : fy) ly.push_back(std::log(v));
    const LineFit fit = fit_line(fx, ly);
    rep.regime_label = RegimeReport::Label::Power;
    rep.fitted_exponent = fit.slope;
    rep.fit_r2 = fit.r2;
    rep.empirical_C = std::exp(fit.intercept);
    return rep;
}

MvtReport mvt_check(long sample_count, int dim, double lambda_lo, double lambda_hi,
                    uint64_t seed) {
    if (!(lambda_lo > 1.0) || !(lambda_hi > lambda_lo))
        throw std::domain_error("mvt_check: need 1 < lambda_lo < lambda_hi");
    MvtReport rep;
    rep.samples = sample_count;
    for (long i = 0; i < sample_count; ++i) {
        CounterRng rng(seed, static_cast<uint64_t>(i));
        const double lambda = rng.uniform(lambda_lo, lambda_hi);
        const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
        Vec u(dim), w(dim);
        for (int j = 0; j < dim; ++j) {
            u[j] = scale * rng.uniform(-1.0, 1.0);
            w[j] = scale * rng.uniform(-1.0, 1.0);
        }
        const double nu = u.norm(), nw = w.norm(), nd = (u - w).norm();
        const double lhs = std::abs(std::pow(nu, lambda) - std::pow(nw, lambda));
        const double rhs = lambda * std::max(1.0, std::pow(2.0, lambda - 2.0)) *
                           (std::pow(nd, lambda - 1.0) + std::pow(nu, lambda - 1.0)) * nd;
        const double ratio = (rhs > 0.0) ? lhs / rhs : 0.0;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (ratio > 1.0 + 1e-12) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

}  // namespace fraclab::estimates
