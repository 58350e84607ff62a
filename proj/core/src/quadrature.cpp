#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "fraclab/rng.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxAngular2d = 1 << 13;

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae/weights).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Panel {
    double a, b, value, err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - h * kXgk[i]);
        fv[14 - i] = f(mid + h * kXgk[i]);
    }
    fv[7] = f(mid);
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    resk += kWgk[7] * fv[7];
    resabs += kWgk[7] * std::abs(fv[7]);
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += kWg[3] * fv[7];

    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    double err = std::abs(resk - resg) * h;
    resasc *= h;
    resabs *= h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
    return {a, b, resk * h, err};
}

}  // namespace

QuadConfig QuadConfig::make(double abs_tol, double rel_tol, int max_subdivisions,
                            double singular_split_radius, long mc_samples, uint64_t seed,
                            double tail_radius) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::domain_error("QuadConfig: tolerances must be positive");
    if (max_subdivisions < 1) throw std::domain_error("QuadConfig: max_subdivisions must be >= 1");
    if (!(singular_split_radius > 0.0 && singular_split_radius < 1.0))
        throw std::domain_error("QuadConfig: singular_split_radius must lie in (0,1)");
    if (mc_samples < 1) throw std::domain_error("QuadConfig: mc_samples must be >= 1");
    if (!(tail_radius > 0.0)) throw std::domain_error("QuadConfig: tail_radius must be positive");
    return {abs_tol, rel_tol, max_subdivisions, singular_split_radius, mc_samples, seed,
            tail_radius};
}

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_subdivisions,
                        const std::vector<double>& breakpoints) {
    QuadResult out;
    if (!(b > a)) return out;

    std::vector<double> nodes{a};
    for (double x : breakpoints)
        if (x > a && x < b) nodes.push_back(x);
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    std::vector<Panel> panels;
    panels.reserve(static_cast<size_t>(max_subdivisions) + nodes.size());
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        panels.push_back(gk15(f, nodes[i], nodes[i + 1]));
        out.evals += 15;
    }

    int splits = 0;
    while (true) {
        double total = 0.0, err = 0.0;
        for (const Panel& p : panels) {
            total += p.value;
            err += p.err;
        }
        const double target = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= target) break;
        if (splits >= max_subdivisions) {
            out.converged = false;
            break;
        }
        // split the worst refinable panel (deterministic tie-break on a).
        // The width floor is relative to the panel's own position, so panels
        // shrinking onto an endpoint singularity stay refinable.
        int worst = -1;
        for (size_t i = 0; i < panels.size(); ++i) {
            // wide enough that quadrature nodes stay representably distinct
            // from the panel ends
            const double width_floor =
                512.0 * std::numeric_limits<double>::epsilon() *
                    std::max(std::abs(panels[i].a), std::abs(panels[i].b)) +
                1e-305;
            if (panels[i].b - panels[i].a <= width_floor) continue;
            if (worst < 0 || panels[i].err > panels[worst].err ||
                (panels[i].err == panels[worst].err && panels[i].a < panels[worst].a))
                worst = static_cast<int>(i);
        }
        if (worst < 0) {
            out.converged = false;
            break;
        }
        const Panel old = panels[static_cast<size_t>(worst)];
        // panels touching the original endpoints split geometrically toward
        // them, which resolves endpoint singularities in O(log 1/tol) splits
        double mid = 0.5 * (old.a + old.b);
        if (old.a == a)
            mid = old.a + 0.125 * (old.b - old.a);
        else if (old.b == b)
            mid = old.b - 0.125 * (old.b - old.a);
        panels[static_cast<size_t>(worst)] = gk15(f, old.a, mid);
        panels.push_back(gk15(f, mid, old.b));
        out.evals += 30;
        ++splits;
    }

    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : panels) {
        out.value += p.value;
        out.err_est += p.err;
    }
    return out;
}

std::vector<double> graded_mesh(double r_max, int pieces, double gamma_est) {
    const double g = std::clamp(gamma_est, 0.0, 1.9);
    const double expo = 2.0 / (2.0 - g);
    std::vector<double> nodes;
    nodes.reserve(static_cast<size_t>(pieces) + 1);
    for (int k = 0; k <= pieces; ++k)
        nodes.push_back(r_max * std::pow(static_cast<double>(k) / pieces, expo));
    return nodes;
}

namespace {

/// Radial integral of f(center + r w) r^{N-1} over the supplied segments,
/// with the tail map applied to unbounded segments.
QuadResult radial_integral(int N, const Vec& center, const Vec& w,
                           const std::function<double(const Vec&)>& f, const RaySegments& segs,
                           double abs_tol, double rel_tol, int max_subdiv, double gamma_at_zero,
                           double tail_from) {
    QuadResult out;
    const auto radial_f = [&](double r) {
        Vec x = center + r * w;
        const double v = f(x);
        return v * std::pow(r, N - 1);
    };
    for (int i = 0; i < segs.count; ++i) {
        const double lo = segs.seg[i].lo;
        double hi = segs.seg[i].hi;
        const bool unbounded = std::isinf(hi);
        if (unbounded) hi = std::max(lo, tail_from);

        if (hi > lo) {
            std::vector<double> bp;
            if (lo == 0.0 && gamma_at_zero > 0.0) bp = graded_mesh(hi, 8, gamma_at_zero);
            out += integrate_1d(radial_f, lo, hi, abs_tol, rel_tol, max_subdiv, bp);
        }
        if (unbounded) {
            // r = T / sigma maps sigma in (0, sigma0] onto [T/sigma0, inf);
            // working in sigma keeps full precision at the far end
            const double T = std::max(lo, tail_from);
            const double sigma0 = (lo > T) ? T / lo : 1.0;
            const auto tail_f = [&](double sigma) {
                if (sigma <= 0.0) return 0.0;
                const double r = T / sigma;
                return radial_f(r) * T / (sigma * sigma);
            };
            out += integrate_1d(tail_f, 0.0, sigma0, abs_tol, rel_tol, max_subdiv,
                                {1e-4 * sigma0, 1e-2 * sigma0, 0.1 * sigma0, 0.5 * sigma0});
        }
    }
    return out;
}

}  // namespace

/// Newton iteration on the Legendre polynomial.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(n - 1 - i)] = w[static_cast<size_t>(i)];
    }
}

QuadResult integrate_polar(int N, const Vec& center, const std::function<double(const Vec&)>& f,
                           const std::function<RaySegments(const Vec&)>& segments,
                           const QuadConfig& cfg, double gamma_at_zero, double tail_from) {
    if (N != 2 && N != 3) throw std::invalid_argument("integrate_polar: N must be 2 or 3");
    if (tail_from <= 0.0) tail_from = cfg.tail_radius;

    const double abs_ray = cfg.abs_tol / (8.0 * kPi);
    const double rel_ray = 0.5 * cfg.rel_tol;

    QuadResult out;
    if (N == 2) {
        // nodes theta_j = 2 pi j / M nest under doubling; cache on the finest grid
        std::unordered_map<uint32_t, QuadResult> cache;
        auto ray = [&](uint32_t fine_idx) -> const QuadResult& {
            auto it = cache.find(fine_idx);
            if (it != cache.end()) return it->second;
            const double theta = 2.0 * kPi * fine_idx / kMaxAngular2d;
            const Vec w = unit2(theta);
            QuadResult r = radial_integral(2, center, w, f, segments(w), abs_ray, rel_ray,
                                           cfg.max_subdivisions, gamma_at_zero, tail_from);
            return cache.emplace(fine_idx, r).first->second;
        };

        int M = 16;
        double prev = 0.0;
        bool have_prev = false;
        while (true) {
            double sum = 0.0, rad_err = 0.0;
            long evals = 0;
            bool rad_conv = true;
            const uint32_t stride = static_cast<uint32_t>(kMaxAngular2d / M);
            for (int j = 0; j < M; ++j) {
                const QuadResult& r = ray(static_cast<uint32_t>(j) * stride);
                sum += r.value;
                rad_err += r.err_est;
                evals += r.evals;
                rad_conv = rad_conv && r.converged;
            }
            const double val = sum * (2.0 * kPi / M);
            const double rerr = rad_err * (2.0 * kPi / M);
            if (have_prev) {
                const double ang_err = std::abs(val - prev);
                if (ang_err <= 0.5 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(val)) ||
                    M >= kMaxAngular2d) {
                    out.value = val;
                    out.err_est = ang_err + rerr;
                    out.converged = rad_conv && (M < kMaxAngular2d ||
                                                 ang_err <= std::max(cfg.abs_tol,
                                                                     cfg.rel_tol * std::abs(val)));
                    out.evals = evals;
                    return out;
                }
            }
            prev = val;
            have_prev = true;
            M *= 2;
        }
    }

    // N == 3: Gauss-Legendre in cos(phi) x uniform azimuth, order doubling
    double prev = 0.0;
    bool have_prev = false;
    for (int L = 8; L <= 128; L *= 2) {
        std::vector<double> gx, gw;
        gauss_legendre(L, gx, gw);
        double sum = 0.0, rad_err = 0.0;
        long evals = 0;
        bool rad_conv = true;
        const int Maz = 2 * L;
        for (int i = 0; i < L; ++i) {
            const double cphi = gx[static_cast<size_t>(i)];
            const double sphi = std::sqrt(std::max(0.0, 1.0 - cphi * cphi));
            for (int j = 0; j < Maz; ++j) {
                const double psi = 2.0 * kPi * (j + 0.5) / Maz;
                Vec w{sphi * std::cos(psi), sphi * std::sin(psi), cphi};
                QuadResult r = radial_integral(3, center, w, f, segments(w), abs_ray, rel_ray,
                                               cfg.max_subdivisions, gamma_at_zero, tail_from);
                sum += gw[static_cast<size_t>(i)] * r.value;
                rad_err += gw[static_cast<size_t>(i)] * r.err_est;
                evals += r.evals;
                rad_conv = rad_conv && r.converged;
            }
        }
        const double val = sum * (2.0 * kPi / Maz);
        const double rerr = rad_err * (2.0 * kPi / Maz);
        if (have_prev) {
            const double ang_err = std::abs(val - prev);
            if (ang_err <= 0.5 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(val)) || L == 128) {
                out.value = val;
                out.err_est = ang_err + rerr;
                out.converged = rad_conv && (L < 128 || ang_err <= std::max(cfg.abs_tol,
                                                                            cfg.rel_tol * std::abs(val)));
                out.evals = evals;
                return out;
            }
        }
        prev = val;
        have_prev = true;
    }
    return out;  // unreachable
}

namespace {

Vec uniform_direction(int N, CounterRng& rng) {
    Vec w(N);
    double n2 = 0.0;
    while (n2 < 1e-12) {
        for (int i = 0; i < N; i += 2) {
            const double u1 = 1.0 - rng.next_double();
            const double u2 = rng.next_double();
            const double r = std::sqrt(-2.0 * std::log(u1));
            w[i] = r * std::cos(2.0 * kPi * u2);
            if (i + 1 < N) w[i + 1] = r * std::sin(2.0 * kPi * u2);
        }
        n2 = w.norm2();
    }
    return (1.0 / std::sqrt(n2)) * w;
}

Vec uniform_in_ball(int N, const Vec& c, double R, CounterRng& rng) {
    const Vec w = uniform_direction(N, rng);
    const double r = R * std::pow(rng.next_double(), 1.0 / N);
    return c + r * w;
}

double ball_volume(int N, double R) {
    return specfun::sphere_measure(N) / N * std::pow(R, N);
}

QuadResult mc_integrate_ball(const ScalarField& f, const Vec& center, double radius,
                             const QuadConfig& cfg) {
    const int N = center.dim;
    const double vol = ball_volume(N, radius);

    // optional importance component around a single declared singular point
    Vec sing;
    bool have_sing = false;
    for (const Vec& p : f.singular_points)
        if (distance(p, center) < radius) {
            sing = p;
            have_sing = true;
            break;
        }
    const double gamma = std::clamp(f.singular_strength, 0.1, N - 0.05);
    const double rho_max = 2.0 * radius;
    const double sig = specfun::sphere_measure(N);
    // radial density ~ r^{N-1-gamma} on (0, rho_max]
    const double qnorm = (N - gamma) / std::pow(rho_max, N - gamma);

    double sum = 0.0, sum2 = 0.0;
    const long n = cfg.mc_samples;
    for (long i = 0; i < n; ++i) {
        CounterRng rng(cfg.seed, static_cast<uint64_t>(i));
        Vec y(N);
        if (have_sing && rng.next_double() < 0.5) {
            const double u = 1.0 - rng.next_double();
            const double r = rho_max * std::pow(u, 1.0 / (N - gamma));
            y = sing + r * uniform_direction(N, rng);
        } else {
            if (have_sing) rng.next_double();  // keep the stream aligned
            y = uniform_in_ball(N, center, radius, rng);
        }
        double p = (distance(y, center) <= radius) ? 1.0 / vol : 0.0;
        double w = 0.0;
        if (have_sing) {
            const double r = distance(y, sing);
            double pq = 0.0;
            if (r > 0.0 && r <= rho_max)
                pq = qnorm * std::pow(r, N - 1.0 - gamma) / (sig * std::pow(r, N - 1.0));
            p = 0.5 * p + 0.5 * pq;
        }
        if (p > 0.0 && distance(y, center) <= radius) w = f(y) / p;
        if (!std::isfinite(w)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "mc_integrate_ball: non-finite sample at |y|=%.6g",
                          y.norm());
            throw std::runtime_error(buf);
        }
        sum += w;
        sum2 += w * w;
    }
    QuadResult out;
    out.value = sum / n;
    const double var = std::max(0.0, sum2 / n - out.value * out.value);
    out.err_est = std::sqrt(var / n);
    out.evals = n;
    return out;
}

}  // namespace

QuadResult integrate_ball(const ScalarField& f, const Vec& center, double radius,
                          const QuadConfig& cfg) {
    const int N = center.dim;
    if (!(radius > 0.0)) throw std::domain_error("integrate_ball: radius must be positive");
    if (N >= 4) return mc_integrate_ball(f, center, radius, cfg);

    Vec polar = center;
    double gamma = 0.0;
    for (const Vec& p : f.singular_points)
        if (distance(p, center) < radius * (1.0 - 1e-12)) {
            polar = p;
            gamma = f.singular_strength;
            break;
        }

    const bool clip = std::isfinite(f.support_radius);
    const Vec origin = Vec::zero(N);
    const double supp = f.support_radius;
    const Vec c = center;
    auto segments = [=](const Vec& w) {
        RaySegments s;
        RayInterval base = ray_ball_intersection(polar, w, c, radius);
        if (base.empty()) return s;
        if (clip) {
            RayInterval sb = ray_ball_intersection(polar, w, origin, supp);
            if (sb.empty()) return s;
            base.lo = std::max(base.lo, sb.lo);
            base.hi = std::min(base.hi, sb.hi);
        }
        s.add(base);
        return s;
    };
    return integrate_polar(N, polar, [&f](const Vec& x) { return f(x); }, segments, cfg, gamma);
}

QuadResult integrate_exterior(const ScalarField& f, const Vec& excluded_center,
                              double excluded_radius, const QuadConfig& cfg) {
    const int N = excluded_center.dim;
    if (!(excluded_radius > 0.0))
        throw std::domain_error("integrate_exterior: excluded radius must be positive");

    if (N >= 4) {
        // radial importance r ~ R u^{-1/gamma} matching the declared decay
        const double gamma = std::max(0.1, f.decay_exponent);
        const double R = excluded_radius;
        const double sig = specfun::sphere_measure(N);
        double sum = 0.0, sum2 = 0.0;
        const long n = cfg.mc_samples;
        for (long i = 0; i < n; ++i) {
            CounterRng rng(cfg.seed, static_cast<uint64_t>(i));
            const double u = 1.0 - rng.next_double();
            const double r = R * std::pow(u, -1.0 / gamma);
            const Vec y = excluded_center + r * uniform_direction(N, rng);
            const double pr = gamma * std::pow(R, gamma) * std::pow(r, -1.0 - gamma);
            const double p = pr / (sig * std::pow(r, N - 1.0));
            const double w = f(y) / p;
            if (!std::isfinite(w)) throw std::runtime_error("integrate_exterior: non-finite sample");
            sum += w;
            sum2 += w * w;
        }
        QuadResult out;
        out.value = sum / n;
        out.err_est = std::sqrt(std::max(0.0, sum2 / n - out.value * out.value) / n);
        out.evals = n;
        out.converged = true;
        return out;
    }

    Vec polar = excluded_center;
    for (const Vec& p : f.singular_points)
        if (distance(p, excluded_center) < excluded_radius) {
            polar = p;
            break;
        }

    const bool clip = std::isfinite(f.support_radius);
    const Vec origin = Vec::zero(N);
    const double supp = f.support_radius;
    const Vec c = excluded_center;
    const double R = excluded_radius;
    auto segments = [=](const Vec& w) {
        RaySegments s;
        const RayInterval excl = ray_ball_intersection(polar, w, c, R);
        RayInterval head{0.0, -1.0};  // the stretch before the exclusion, if any
        RayInterval full{0.0, std::numeric_limits<double>::infinity()};
        if (!excl.empty()) {
            if (excl.lo > 0.0) head = {0.0, excl.lo};  // polar center outside the ball
            full.lo = excl.hi;
        }
        if (clip) {
            const RayInterval sb = ray_ball_intersection(polar, w, origin, supp);
            if (sb.empty()) return s;
            head.lo = std::max(head.lo, sb.lo);
            head.hi = std::min(head.hi, sb.hi);
            full.lo = std::max(full.lo, sb.lo);
            full.hi = std::min(full.hi, sb.hi);
        }
        s.add(head);
        s.add(full);
        return s;
    };
    const double tail = std::max(cfg.tail_radius, 2.0 * excluded_radius);
    return integrate_polar(N, polar, [&f](const Vec& x) { return f(x); }, segments, cfg, 0.0,
                           tail);
}

McResult mc_integrate_pairs(const std::function<double(const Vec&, const Vec&)>& g,
                            const Vec& center, double radius, double singular_strength,
                            const QuadConfig& cfg) {
    const int N = center.dim;
    const double vol = ball_volume(N, radius);
    const double sig = specfun::sphere_measure(N);
    const double rho_min = 1e-9 * radius, rho_max = 2.0 * radius;
    const double sigma = singular_strength;
    const bool power = sigma > 0.0;
    // radial density on [rho_min, rho_max]
    const double c_pow = power ? sigma / (std::pow(rho_min, -sigma) - std::pow(rho_max, -sigma))
                               : 1.0 / std::log(rho_max / rho_min);

    auto rho_density = [&](double r) -> double {
        if (r < rho_min || r > rho_max) return 0.0;
        return power ? c_pow * std::pow(r, -1.0 - sigma) : c_pow / r;
    };
    auto rho_sample = [&](double u) -> double {
        if (power) {
            const double lo = std::pow(rho_min, -sigma), hi = std::pow(rho_max, -sigma);
            return std::pow(lo - u * (lo - hi), -1.0 / sigma);
        }
        return rho_min * std::exp(u * std::log(rho_max / rho_min));
    };

    double sum = 0.0, sum2 = 0.0;
    const long n = cfg.mc_samples;
    for (long i = 0; i < n; ++i) {
        CounterRng rng(cfg.seed, static_cast<uint64_t>(i));
        const bool diag = rng.next_double() < 0.5;
        const Vec x = uniform_in_ball(N, center, radius, rng);
        Vec y(N);
        if (diag) {
            const double rho = rho_sample(rng.next_double());
            y = x + rho * uniform_direction(N, rng);
        } else {
            y = uniform_in_ball(N, center, radius, rng);
        }
        double w = 0.0;
        if (distance(y, center) <= radius) {
            const double r = distance(x, y);
            const double pa = 1.0 / (vol * vol);
            const double pb = (r > 0.0) ? rho_density(r) / (vol * sig * std::pow(r, N - 1.0)) : 0.0;
            const double p = 0.5 * pa + 0.5 * pb;
            w = g(x, y) / p;
        }
        if (!std::isfinite(w)) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "mc_integrate_pairs: non-finite sample, x=(%.9g,%.9g..) y=(%.9g,%.9g..)",
                          x[0], N > 1 ? x[1] : 0.0, y[0], N > 1 ? y[1] : 0.0);
            throw std::runtime_error(buf);
        }
        sum += w;
        sum2 += w * w;
    }
    McResult out;
    out.value = sum / n;
    const double var = std::max(0.0, sum2 / n - out.value * out.value);
    out.std_err = std::sqrt(var / std::max<long>(1, n - 1));
    out.samples = n;
    return out;
}

}  // namespace fraclab::quad
