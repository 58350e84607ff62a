#include "fraclab/green.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fraclab/operators.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/rng.hpp"

namespace fraclab::green {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTabLo = 1e-14, kTabHi = 1e14;
constexpr int kTabSize = 6000;

double profile_integrand(double r, double s, double halfN) {
    return std::pow(r, s - 1.0) * std::pow(1.0 + r, -halfN);
}

/// One unsubdivided Gauss-Kronrod panel (the table builder's increment; the
/// intervals are narrow enough for full precision).
double gk15_panel(double a, double b, double s, double halfN) {
    static const double xg[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                 0.741531185599394, 0.586087235467691, 0.405845151377397,
                                 0.207784955007898, 0.0};
    static const double wg[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                 0.140653259715525, 0.169004726639267, 0.190350578064785,
                                 0.204432940075298, 0.209482141084728};
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = wg[7] * profile_integrand(mid, s, halfN);
    for (int i = 0; i < 7; ++i)
        acc += wg[i] * (profile_integrand(mid - h * xg[i], s, halfN) +
                        profile_integrand(mid + h * xg[i], s, halfN));
    return acc * h;
}

}  // namespace

GreenKernel::GreenKernel(const specfun::FracParams& params, BallGeometry geometry)
    : params_(params), geo_(geometry) {
    const double N = params_.N, s = params_.s;
    kappa_ = std::exp(specfun::ln_gamma(0.5 * N) - 2.0 * s * std::log(2.0) -
                      0.5 * N * std::log(kPi) - 2.0 * specfun::ln_gamma(s));
    phi_inf_ = std::exp(specfun::ln_gamma(s) + specfun::ln_gamma(0.5 * N - s) -
                        specfun::ln_gamma(0.5 * N));
    build_table();
}

void GreenKernel::build_table() {
    const double s = params_.s, halfN = 0.5 * params_.N;
    lv_lo_ = std::log(kTabLo);
    lv_hi_ = std::log(kTabHi);
    dlv_ = (lv_hi_ - lv_lo_) / (kTabSize - 1);
    tab_val_.resize(kTabSize);
    tab_slope_.resize(kTabSize);

    // series head at the left end, then panel-by-panel accumulation
    const double g0 = kTabLo;
    double acc = std::pow(g0, s) / s - halfN * std::pow(g0, s + 1.0) / (s + 1.0) +
                 0.5 * halfN * (halfN + 1.0) * std::pow(g0, s + 2.0) / (s + 2.0);
    tab_val_[0] = acc;
    double prev = g0;
    for (int i = 1; i < kTabSize; ++i) {
        const double r = std::exp(lv_lo_ + i * dlv_);
        acc += gk15_panel(prev, r, s, halfN);
        tab_val_[static_cast<size_t>(i)] = acc;
        prev = r;
    }
    for (int i = 0; i < kTabSize; ++i) {
        const double r = std::exp(lv_lo_ + i * dlv_);
        // d Phi / d(log r0) = r0^s (1+r0)^{-N/2}
        tab_slope_[static_cast<size_t>(i)] = std::pow(r, s) * std::pow(1.0 + r, -halfN);
    }
}

double GreenKernel::profile(double r0) const {
    if (!(r0 >= 0.0)) throw std::domain_error("profile: r0 must be nonnegative");
    const double s = params_.s, halfN = 0.5 * params_.N;
    if (r0 == 0.0) return 0.0;
    if (r0 < kTabLo)
        return std::pow(r0, s) / s - halfN * std::pow(r0, s + 1.0) / (s + 1.0) +
               0.5 * halfN * (halfN + 1.0) * std::pow(r0, s + 2.0) / (s + 2.0);
    if (r0 > kTabHi) {
        const double sig = halfN - s;
        const double tail = std::pow(r0, -sig) *
                            (1.0 / sig - halfN / ((sig + 1.0) * r0) +
                             0.5 * halfN * (halfN + 1.0) / ((sig + 2.0) * r0 * r0));
        return phi_inf_ - tail;
    }
    const double v = std::log(r0);
    int j = static_cast<int>((v - lv_lo_) / dlv_);
    j = std::clamp(j, 0, kTabSize - 2);
    const double v0 = lv_lo_ + j * dlv_;
    const double u = (v - v0) / dlv_;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * tab_val_[static_cast<size_t>(j)] + h10 * dlv_ * tab_slope_[static_cast<size_t>(j)] +
           h01 * tab_val_[static_cast<size_t>(j) + 1] +
           h11 * dlv_ * tab_slope_[static_cast<size_t>(j) + 1];
}

double GreenKernel::profile_direct(double r0, const quad::QuadConfig& cfg) const {
    const double s = params_.s, halfN = 0.5 * params_.N;
    if (r0 <= 0.0) return 0.0;
    // substitute v = r^s to flatten the left endpoint
    const double v_hi = std::pow(std::min(r0, 1.0), s);
    auto left = [&](double v) {
        const double r = std::pow(v, 1.0 / s);
        return std::pow(1.0 + r, -halfN) / s;
    };
    quad::QuadResult res =
        quad::integrate_1d(left, 0.0, v_hi, cfg.abs_tol * 0.1, cfg.rel_tol * 0.1, 400);
    if (r0 > 1.0) {
        auto right = [&](double r) { return profile_integrand(r, s, halfN); };
        res += quad::integrate_1d(right, 1.0, r0, cfg.abs_tol * 0.1, cfg.rel_tol * 0.1, 400,
                                  quad::graded_mesh(r0 - 1.0, 12, 0.0));
    }
    return res.value;
}

double GreenKernel::value(const Vec& x, const Vec& y) const {
    Vec a = x, b = y;
    // lexicographic sort makes the symmetry exact in floating point
    for (int i = 0; i < a.dim; ++i) {
        if (a[i] < b[i]) break;
        if (a[i] > b[i]) {
            std::swap(a, b);
            break;
        }
    }
    const double R = geo_.radius;
    const Vec ah = (1.0 / R) * (a - geo_.center), bh = (1.0 / R) * (b - geo_.center);
    const double wa = 1.0 - ah.norm2(), wb = 1.0 - bh.norm2();
    if (wa <= 0.0 || wb <= 0.0) return 0.0;
    const double d2 = (ah - bh).norm2();
    if (d2 == 0.0) throw std::domain_error("green kernel: diagonal x == y");
    const double r0 = wa * wb / d2;
    const double N = params_.N, s = params_.s;
    return std::pow(R, 2.0 * s - N) * kappa_ * std::pow(d2, 0.5 * (2.0 * s - N)) * profile(r0);
}

Vec GreenKernel::gradient_x(const Vec& x, const Vec& y) const {
    const double R = geo_.radius;
    const Vec xh = (1.0 / R) * (x - geo_.center), yh = (1.0 / R) * (y - geo_.center);
    const double wx = 1.0 - xh.norm2(), wy = 1.0 - yh.norm2();
    if (wx <= 0.0 || wy <= 0.0)
        throw std::domain_error("green gradient: both points must be interior");
    const Vec diff = xh - yh;
    const double d2 = diff.norm2();
    if (d2 == 0.0) throw std::domain_error("green gradient: diagonal x == y");
    const double N = params_.N, s = params_.s;
    const double r0 = wx * wy / d2;
    const double phi = profile(r0);
    const double dphi = std::pow(r0, s - 1.0) * std::pow(1.0 + r0, -0.5 * N);
    const double pw = std::pow(d2, 0.5 * (2.0 * s - N));
    // grad r0 = -2 [ x wy + r0 (x-y) ] / d2   (unit-ball coordinates)
    Vec grad = Vec::zero(x.dim);
    for (int i = 0; i < x.dim; ++i) {
        const double dr0 = -2.0 * (xh[i] * wy + r0 * diff[i]) / d2;
        grad[i] = kappa_ * pw * ((2.0 * s - N) * diff[i] / d2 * phi + dphi * dr0);
    }
    return std::pow(R, 2.0 * s - N - 1.0) * grad;
}

ScalarField GreenKernel::slice(const Vec& x0) const {
    ScalarField f;
    const GreenKernel* self = this;
    f.eval = [self, x0](const Vec& y) {
        if (distance(y, x0) == 0.0) return 0.0;
        return self->value(x0, y);
    };
    f.support_radius = geo_.center.norm() + geo_.radius;
    f.interior_smooth = true;
    f.singular_points = {x0};
    f.singular_strength = std::max(0.25, params_.N - 2.0 * params_.s);
    f.holder_exponent = params_.s;
    return f;
}

std::vector<std::pair<Vec, Vec>> sample_pairs_stratified(const BallGeometry& geo, int count,
                                                         uint64_t seed, double delta_min,
                                                         double sep_min) {
    const int N = geo.center.dim;
    std::vector<std::pair<double, double>> delta_bins, sep_bins;
    for (double hi = geo.radius; hi > delta_min * 1.0001; hi *= 0.1)
        delta_bins.emplace_back(std::max(delta_min, hi * 0.1), hi);
    for (double hi = 2.0 * geo.radius; hi > sep_min * 1.0001; hi *= 0.1)
        sep_bins.emplace_back(std::max(sep_min, hi * 0.1), hi);

    const int cells = static_cast<int>(delta_bins.size() * sep_bins.size());
    std::vector<std::pair<Vec, Vec>> out;
    out.reserve(static_cast<size_t>(count));
    const uint64_t scramble = seed * 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < count; ++i) {
        const int cell = i % cells;
        const auto& db = delta_bins[static_cast<size_t>(cell) % delta_bins.size()];
        const auto& sb = sep_bins[static_cast<size_t>(cell) / delta_bins.size()];
        const uint64_t j = static_cast<uint64_t>(i / cells);
        for (uint64_t attempt = 0;; ++attempt) {
            const uint64_t ix = (j * 16 + attempt) * 131 + scramble % 1000003ull + 1;
            const double dx = db.first * std::pow(db.second / db.first, radical_inverse(ix, 2));
            const double th = 2.0 * kPi * radical_inverse(ix, 3);
            const double sep = sb.first * std::pow(sb.second / sb.first, radical_inverse(ix, 5));
            const double ph = 2.0 * kPi * radical_inverse(ix, 7);
            Vec x = geo.center, y;
            if (N == 2) {
                x += (geo.radius - dx) * unit2(th);
                y = x + sep * unit2(ph);
            } else {
                const double cph = 2.0 * radical_inverse(ix, 11) - 1.0;
                const double sph = std::sqrt(std::max(0.0, 1.0 - cph * cph));
                Vec wx{sph * std::cos(th), sph * std::sin(th), cph};
                const double cps = 2.0 * radical_inverse(ix, 13) - 1.0;
                const double sps = std::sqrt(std::max(0.0, 1.0 - cps * cps));
                Vec wy{sps * std::cos(ph), sps * std::sin(ph), cps};
                x += (geo.radius - dx) * wx;
                y = x + sep * wy;
            }
            if (geo.delta(y) > 1e-9 && distance(x, y) > 1e-12) {
                out.emplace_back(x, y);
                break;
            }
            if (attempt == 15) {  // give the pair up rather than loop forever
                out.emplace_back(x, 0.5 * (x + geo.center));
                break;
            }
        }
    }
    return out;
}

KernelBoundReport kernel_bound_check(const GreenKernel& k, int pair_count, uint64_t seed) {
    const auto pairs = sample_pairs_stratified(k.geometry(), pair_count, seed);
    const double s = k.params().s, N = k.params().N;
    const auto& geo = k.geometry();

    KernelBoundReport rep;
    rep.upper_bound.check_id = "green-kernel-upper-bound";
    rep.gradient_bound.check_id = "green-kernel-gradient-bound";
    double sup1 = 0, sup1h = 0, sup2 = 0, sup2h = 0, mismatch = 0;
    long n = 0;
    for (const auto& [x, y] : pairs) {
        if (!geo.contains(x) || !geo.contains(y)) continue;
        const double d = distance(x, y);
        if (d < 1e-12) continue;
        const double G = k.value(x, y);
        const double dx_ = geo.delta(x), dy_ = geo.delta(y);
        const double bound = std::min({std::pow(d, 2.0 * s - N),
                                       std::pow(dx_, s) * std::pow(d, s - N),
                                       std::pow(dy_, s) * std::pow(d, s - N)});
        const double r1 = G / bound;
        const Vec grad = k.gradient_x(x, y);
        const double r2 = grad.norm() / (G * std::max(1.0 / d, 1.0 / dx_));
        ++n;
        sup1 = std::max(sup1, r1);
        sup2 = std::max(sup2, r2);
        if (n <= static_cast<long>(pairs.size()) / 2) {
            sup1h = std::max(sup1h, r1);
            sup2h = std::max(sup2h, r2);
        }
        rep.upper_bound.ratios.push_back(r1);
        rep.gradient_bound.ratios.push_back(r2);
        if (n % 16 == 1 && d > 1e-3 && dx_ > 1e-3) {
            // centered differences, componentwise
            const double h = 1e-6 * std::min(d, dx_);
            double worst = 0.0;
            for (int i = 0; i < x.dim; ++i) {
                Vec xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                const double fd = (k.value(xp, y) - k.value(xm, y)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - grad[i]));
            }
            mismatch = std::max(mismatch, worst / std::max(1e-300, grad.norm()));
        }
    }
    auto finalize = [n](EstimateReport& r, double sup, double suph) {
        r.sup_ratio = sup;
        r.sup_ratio_half = suph;
        r.stability = (sup > 0) ? std::abs(sup - suph) / sup : 0.0;
        r.sample_stable = r.stability <= 0.10;
        r.empirical_C = sup;
        r.sample_count = n;
    };
    finalize(rep.upper_bound, sup1, sup1h);
    finalize(rep.gradient_bound, sup2, sup2h);
    rep.max_gradient_mismatch = mismatch;
    rep.gradient_ok = mismatch <= 1e-5;
    return rep;
}

namespace {

/// Shared decomposition pieces for the t/2-Laplacian and t-gradient of the
/// kernel: the singularity of G(.,y) at y is excised on B_{|x-y|/2}(y) and
/// integrated in polar coordinates around y; the remaining regional integral
/// runs in polar coordinates around x with that ball carved out of each ray.
struct KernelOpGeometry {
    Vec x, y;
    double ry;                 // excision radius around y
    double rho;                // symmetrization radius around x (interior x only)
    BallGeometry geo;

    quad::RaySegments piece1_segments(const Vec& w) const {
        quad::RaySegments s;
        RayInterval dom = ray_ball_intersection(y, w, geo.center, geo.radius);
        if (!dom.empty()) s.add({dom.lo, std::min(dom.hi, ry)});
        return s;
    }
    quad::RaySegments piece2_segments(const Vec& w, double inner) const {
        quad::RaySegments s;
        RayInterval dom = ray_ball_intersection(x, w, geo.center, geo.radius);
        if (dom.empty()) return s;
        dom.lo = std::max(dom.lo, inner);
        if (dom.empty()) return s;
        const RayInterval hole = ray_ball_intersection(x, w, y, ry);
        if (hole.empty() || hole.lo >= dom.hi || hole.hi <= dom.lo) {
            s.add(dom);
            return s;
        }
        s.add({dom.lo, std::min(dom.hi, hole.lo)});
        s.add({std::max(dom.lo, hole.hi), dom.hi});
        return s;
    }
};

}  // namespace

quad::QuadResult frac_laplacian_of_kernel(const GreenKernel& k, double t, const Vec& x,
                                          const Vec& y, const quad::QuadConfig& cfg,
                                          double r_min) {
    const auto& geo = k.geometry();
    if (!geo.contains(x) || !geo.contains(y))
        throw std::domain_error("frac_laplacian_of_kernel: points must be interior");
    const double d = distance(x, y);
    if (d < r_min)
        throw std::domain_error("frac_laplacian_of_kernel: |x-y| below the diagonal guard");
    const int N = x.dim;
    const double A = ops::kernel_norm_const(N, t);
    const double Gxy = k.value(x, y);

    KernelOpGeometry kg{x, y, 0.5 * d, cfg.singular_split_radius * std::min(geo.delta(x), 0.5 * d),
                        geo};

    // complement: G(x,y) times the kernel mass of the domain complement
    quad::QuadResult comp = ops::complement_geometric(x, t, geo, cfg);
    comp.value *= Gxy;
    comp.err_est *= Gxy;

    auto g = [&k, &y](const Vec& z) { return (distance(z, y) == 0.0) ? 0.0 : k.value(z, y); };

    // piece 1: the excised ball around y (kernel in z smooth there)
    auto p1_integrand = [&](const Vec& z) {
        const double r = distance(x, z);
        return (Gxy - g(z)) * std::pow(r, -static_cast<double>(N) - t);
    };
    quad::QuadResult p1 =
        quad::integrate_polar(N, y, p1_integrand, [&](const Vec& w) { return kg.piece1_segments(w); },
                              cfg, std::max(0.25, N - 2.0 * k.params().s));

    // piece 2 near: symmetrized difference around x
    quad::QuadResult p2n = ops::detail::near_field_symmetric(g, x, Gxy, kg.rho, t, cfg);

    // piece 2 far: domain minus both balls, polar around x
    auto p2_integrand = [&](const Vec& z) {
        const double r = distance(x, z);
        return (Gxy - g(z)) * std::pow(r, -static_cast<double>(N) - t);
    };
    quad::QuadResult p2f = quad::integrate_polar(
        N, x, p2_integrand, [&](const Vec& w) { return kg.piece2_segments(w, kg.rho); }, cfg);

    quad::QuadResult out;
    out.value = A * (comp.value + p1.value + p2n.value + p2f.value);
    out.err_est = A * (comp.err_est + p1.err_est + p2n.err_est + p2f.err_est);
    out.converged = comp.converged && p1.converged && p2n.converged && p2f.converged;
    out.evals = comp.evals + p1.evals + p2n.evals + p2f.evals;
    return out;
}

quad::QuadResult frac_laplacian_of_kernel_exterior(const GreenKernel& k, double t, const Vec& x,
                                                   const Vec& y, const quad::QuadConfig& cfg) {
    const auto& geo = k.geometry();
    if (geo.contains(x))
        throw std::domain_error("frac_laplacian_of_kernel_exterior: x must be exterior");
    if (!geo.contains(y))
        throw std::domain_error("frac_laplacian_of_kernel_exterior: y must be interior");
    const int N = x.dim;
    const double A = ops::kernel_norm_const(N, t);
    const double d = distance(x, y);

    KernelOpGeometry kg{x, y, std::min(0.5 * d, 0.5 * geo.delta(y) + 0.25 * d), 0.0, geo};
    auto g = [&k, &y](const Vec& z) { return (distance(z, y) == 0.0) ? 0.0 : k.value(z, y); };

    auto p1_integrand = [&](const Vec& z) {
        const double r = distance(x, z);
        return g(z) * std::pow(r, -static_cast<double>(N) - t);
    };
    quad::QuadResult p1 =
        quad::integrate_polar(N, y, p1_integrand, [&](const Vec& w) { return kg.piece1_segments(w); },
                              cfg, std::max(0.25, N - 2.0 * k.params().s));
    quad::QuadResult p2 = quad::integrate_polar(
        N, x, p1_integrand, [&](const Vec& w) { return kg.piece2_segments(w, 0.0); }, cfg);

    quad::QuadResult out;
    out.value = A * (p1.value + p2.value);
    out.err_est = A * (p1.err_est + p2.err_est);
    out.converged = p1.converged && p2.converged;
    out.evals = p1.evals + p2.evals;
    return out;
}

KernelGradientResult riesz_gradient_of_kernel(const GreenKernel& k, double t, const Vec& x,
                                              const Vec& y, const quad::QuadConfig& cfg,
                                              double r_min) {
    const auto& geo = k.geometry();
    if (!geo.contains(x) || !geo.contains(y))
        throw std::domain_error("riesz_gradient_of_kernel: points must be interior");
    const double d = distance(x, y);
    if (d < r_min)
        throw std::domain_error("riesz_gradient_of_kernel: |x-y| below the diagonal guard");
    const int N = x.dim;
    const double mu = specfun::norm_const_gradient(N, t);
    const double Gxy = k.value(x, y);

    KernelOpGeometry kg{x, y, 0.5 * d, cfg.singular_split_radius * std::min(geo.delta(x), 0.5 * d),
                        geo};
    auto g = [&k, &y](const Vec& z) { return (distance(z, y) == 0.0) ? 0.0 : k.value(z, y); };

    // complement direction integral: -(1/t) int_S w exit(w)^{-t} dw
    KernelGradientResult out;
    out.value = Vec::zero(N);
    Vec comp = Vec::zero(N);
    {
        int M = 64;
        Vec prev = Vec::zero(N);
        for (;; M *= 2) {
            Vec acc = Vec::zero(N);
            for (int j = 0; j < M; ++j) {
                const Vec w = unit2(2.0 * kPi * j / M);
                const double ex = geo.exit_radius(x, w);
                acc += std::pow(ex, -t) * w;
            }
            acc *= 2.0 * kPi / (M * t);
            if (M > 64 && (distance(acc, prev) <= 1e-12 + 1e-10 * acc.norm() || M >= 4096)) {
                comp = -1.0 * acc;
                break;
            }
            prev = acc;
        }
    }
    comp *= Gxy;

    for (int i = 0; i < N; ++i) {
        quad::QuadResult near = ops::detail::near_field_moment(g, x, i, kg.rho, t, cfg);
        auto integrand = [&](const Vec& z) {
            const double r = distance(x, z);
            return (z[i] - x[i]) * (g(z) - Gxy) * std::pow(r, -static_cast<double>(N) - t - 1.0);
        };
        quad::QuadResult far = quad::integrate_polar(
            N, x, integrand, [&](const Vec& w) { return kg.piece2_segments(w, kg.rho); }, cfg);
        // the y-ball piece of the same componentwise integrand
        quad::QuadResult p1 = quad::integrate_polar(
            N, y, integrand, [&](const Vec& w) { return kg.piece1_segments(w); }, cfg,
            std::max(0.25, N - 2.0 * k.params().s));
        out.value[i] = mu * (comp[i] + near.value + far.value + p1.value);
        out.err_est += mu * (near.err_est + far.err_est + p1.err_est);
        out.converged = out.converged && near.converged && far.converged && p1.converged;
    }
    return out;
}

namespace {

double interior_bound_rhs(const BallGeometry& geo, double s, double t, const Vec& x,
                          const Vec& y) {
    const double d = distance(x, y);
    const double dx_ = geo.delta(x);
    const double N = x.dim;
    return std::pow(d, -(N - (2.0 * s - t))) *
           (std::abs(std::log(d)) + std::abs(std::log(dx_)) +
            std::pow(d, t - s) * std::pow(dx_, s - t));
}

EstimateReport ratio_sup_scan(const std::string& id, int pair_count,
                              const std::function<double(int)>& ratio_of, int threads) {
    EstimateReport rep;
    rep.check_id = id;
    rep.ratios.assign(static_cast<size_t>(pair_count), 0.0);
    std::vector<char> ok(static_cast<size_t>(pair_count), 1);
    parallel_for(pair_count, threads, [&](int i) {
        const double r = ratio_of(i);
        rep.ratios[static_cast<size_t>(i)] = r;
        if (!std::isfinite(r)) ok[static_cast<size_t>(i)] = 0;
    });
    double sup = 0, suph = 0;
    for (int i = 0; i < pair_count; ++i) {
        if (!ok[static_cast<size_t>(i)]) rep.all_finite = false;
        const double r = rep.ratios[static_cast<size_t>(i)];
        sup = std::max(sup, r);
        if (i < pair_count / 2) suph = std::max(suph, r);
    }
    rep.sup_ratio = sup;
    rep.sup_ratio_half = suph;
    rep.stability = (sup > 0) ? std::abs(sup - suph) / sup : 0.0;
    rep.sample_stable = rep.stability <= 0.10;
    rep.empirical_C = sup;
    rep.sample_count = pair_count;
    return rep;
}

}  // namespace

EstimateReport interior_bound_check(const GreenKernel& k, double t, int pair_count, uint64_t seed,
                                    const quad::QuadConfig& cfg, int threads) {
    const auto pairs = sample_pairs_stratified(k.geometry(), pair_count, seed, 1e-3, 2e-3);
    const auto& geo = k.geometry();
    const double s = k.params().s;
    return ratio_sup_scan("green-interior-flap-bound", static_cast<int>(pairs.size()),
                          [&](int i) {
                              const auto& [x, y] = pairs[static_cast<size_t>(i)];
                              if (!geo.contains(x) || !geo.contains(y)) return 0.0;
                              if (distance(x, y) < 1.5e-3) return 0.0;
                              quad::QuadResult v = frac_laplacian_of_kernel(k, t, x, y, cfg, 1e-3);
                              return std::abs(v.value) / interior_bound_rhs(geo, s, t, x, y);
                          },
                          threads);
}

EstimateReport gradient_bound_check(const GreenKernel& k, double t, int pair_count, uint64_t seed,
                                    const quad::QuadConfig& cfg, int threads) {
    const auto pairs = sample_pairs_stratified(k.geometry(), pair_count, seed, 1e-3, 2e-3);
    const auto& geo = k.geometry();
    const double s = k.params().s;
    return ratio_sup_scan("green-gradient-bound", static_cast<int>(pairs.size()),
                          [&](int i) {
                              const auto& [x, y] = pairs[static_cast<size_t>(i)];
                              if (!geo.contains(x) || !geo.contains(y)) return 0.0;
                              if (distance(x, y) < 1.5e-3) return 0.0;
                              KernelGradientResult v =
                                  riesz_gradient_of_kernel(k, t, x, y, cfg, 1e-3);
                              return v.value.norm() / interior_bound_rhs(geo, s, t, x, y);
                          },
                          threads);
}

ExteriorReport exterior_check(const GreenKernel& k, double t, int sample_count, uint64_t seed,
                              const quad::QuadConfig& cfg, int threads) {
    const auto& geo = k.geometry();
    const int N = geo.center.dim;
    const double s = k.params().s;
    const double R_enc = geo.enclosing_R();
    ExteriorReport rep;

    // near regime: x between the domain and the enclosing sphere
    std::vector<std::pair<Vec, Vec>> near_samples;
    const uint64_t scr = seed * 0x9e3779b97f4a7c15ull % 1000003ull;
    for (int i = 0; i < sample_count; ++i) {
        const uint64_t ix = static_cast<uint64_t>(i) * 73 + scr + 1;
        const double dx_ = 1e-2 * std::pow((R_enc - geo.radius) / 1e-2, radical_inverse(ix, 2));
        const double thx = 2.0 * kPi * radical_inverse(ix, 3);
        const double ry = geo.radius * std::sqrt(radical_inverse(ix, 5));
        const double thy = 2.0 * kPi * radical_inverse(ix, 7);
        Vec x = geo.center + (geo.radius + dx_) * unit2(thx);
        Vec y = geo.center + ry * unit2(thy);
        if (geo.delta(y) < 1e-6) continue;
        near_samples.emplace_back(x, y);
    }
    rep.near_regime = ratio_sup_scan(
        "green-exterior-near", static_cast<int>(near_samples.size()),
        [&](int i) {
            const auto& [x, y] = near_samples[static_cast<size_t>(i)];
            quad::QuadResult v = frac_laplacian_of_kernel_exterior(k, t, x, y, cfg);
            const double d = distance(x, y);
            const double rhs = std::pow(d, 2.0 * s - N) *
                               (std::pow(d, -t) + std::pow(x.norm() - geo.radius, -t));
            return std::abs(v.value) / rhs;
        },
        threads);

    // far regime with the decay fit over |x| in [5, 50]
    const int nfar = std::max(8, sample_count / 8);
    std::vector<double> lx, lv;
    std::vector<double> far_ratios(static_cast<size_t>(nfar));
    std::vector<Vec> far_x(static_cast<size_t>(nfar));
    for (int i = 0; i < nfar; ++i) {
        const double r = 5.0 * std::pow(10.0, static_cast<double>(i) / (nfar - 1));
        const double th = 2.0 * kPi * radical_inverse(static_cast<uint64_t>(i) + 1, 3);
        far_x[static_cast<size_t>(i)] = geo.center + r * unit2(th);
    }
    const Vec y0 = geo.center;
    Vec y_far = y0;
    y_far[0] += 0.1 * geo.radius;
    parallel_for(nfar, threads, [&](int i) {
        quad::QuadResult v =
            frac_laplacian_of_kernel_exterior(k, t, far_x[static_cast<size_t>(i)], y_far, cfg);
        far_ratios[static_cast<size_t>(i)] = std::abs(v.value);
    });
    double supf = 0, supfh = 0;
    for (int i = 0; i < nfar; ++i) {
        const double ax = far_x[static_cast<size_t>(i)].norm();
        const double val = far_ratios[static_cast<size_t>(i)];
        lx.push_back(std::log(1.0 + ax));
        lv.push_back(std::log(std::max(val, 1e-300)));
        const double ratio = val * std::pow(1.0 + ax, N + t);
        supf = std::max(supf, ratio);
        if (i < nfar / 2) supfh = std::max(supfh, ratio);
    }
    rep.far_regime.check_id = "green-exterior-far";
    rep.far_regime.sup_ratio = supf;
    rep.far_regime.sup_ratio_half = supfh;
    rep.far_regime.stability = supf > 0 ? std::abs(supf - supfh) / supf : 0.0;
    rep.far_regime.sample_stable = rep.far_regime.stability <= 0.10;
    rep.far_regime.empirical_C = supf;
    rep.far_regime.sample_count = nfar;
    rep.far_decay_fit = fit_line(lx, lv);
    return rep;
}

}  // namespace fraclab::green
