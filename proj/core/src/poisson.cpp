#include "fraclab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "fraclab/parallel.hpp"
#include "fraclab/rng.hpp"

namespace fraclab::poisson {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

RegularityExponents exponents(const specfun::FracParams& params, double t) {
    const double N = params.N, s = params.s, m = params.m;
    if (!(t >= s && t < params.t_sup()))
        throw std::domain_error("exponents: t must lie in [s, min{1,2s})");
    if (!(m >= 1.0)) throw std::domain_error("exponents: m must be >= 1");

    RegularityExponents e;
    e.m_star = std::max(1.0, N / (N + s - N * (t - s)) + params.eps_star);

    if (t == s) {
        e.p_star = std::isinf(m) ? kInf : m * N / (N - m * s);
        if (!std::isinf(m) && N - m * s <= 0.0) e.p_star = kInf;
    } else {
        const double den = N - m * s + m * N * (t - s);
        const double first = (std::isinf(m)) ? N / (N * (t - s) - s) : m * N / den;
        const double cap = 1.0 / (t - s);
        e.p_star = (std::isinf(m) ? (N * (t - s) - s > 0.0 ? std::min(first, cap) : cap)
                                  : (den > 0.0 ? std::min(first, cap) : cap));
    }

    // L^r table for the solution
    if (m > N / (2.0 * s)) {
        e.r_of_m = {kInf, true};
    } else if (m == N / (2.0 * s)) {
        e.r_of_m = {kInf, false};
    } else if (m > 1.0) {
        e.r_of_m = {m * N / (N - 2.0 * m * s), true};
    } else {
        e.r_of_m = {N / (N - 2.0 * s), false};
    }
    // L^q table for solution / delta^s
    if (m > N / s) {
        e.q_of_m = {kInf, true};
    } else if (m == N / s) {
        e.q_of_m = {kInf, false};
    } else if (m > 1.0) {
        e.q_of_m = {m * N / (N - m * s), true};
    } else {
        e.q_of_m = {N / (N - s), false};
    }
    // weighted-norm thresholds
    const double m_crit = N / (2.0 * s - t);
    e.very_integrable = m > m_crit;
    if (m > m_crit) {
        e.thm14_p = {kInf, true};
        e.thm14_q = {kInf, true};
    } else if (m == m_crit) {
        e.thm14_p = {kInf, false};
        e.thm14_q = {kInf, false};
    } else {
        e.thm14_p = {m * N / (N - m * (2.0 * s - t)), false};
        e.thm14_q = {m * N / (N - m * (2.0 * s - t)), false};
    }
    return e;
}

// ---------------------------------------------------------------------------
// solution access: direct memoized evaluation plus an optional radial table
// ---------------------------------------------------------------------------

namespace {

struct VecHash {
    size_t operator()(const Vec& v) const {
        uint64_t h = 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(v.dim);
        for (int i = 0; i < v.dim; ++i) {
            uint64_t b;
            static_assert(sizeof(double) == sizeof(uint64_t));
            std::memcpy(&b, &v.c[static_cast<size_t>(i)], sizeof b);
            h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

double solve_value_direct(const ScalarField& f, const green::GreenKernel& k,
                          const quad::QuadConfig& cfg, const Vec& x) {
    const auto& geo = k.geometry();
    if (!geo.contains(x)) return 0.0;
    ScalarField integrand;
    const ScalarField* fp = &f;
    const green::GreenKernel* kp = &k;
    integrand.eval = [fp, kp, x](const Vec& y) {
        const double fv = (*fp)(y);
        if (fv == 0.0) return 0.0;
        return kp->value(x, y) * fv;
    };
    integrand.singular_points = {x};
    integrand.singular_strength = std::max(0.25, k.params().N - 2.0 * k.params().s);
    integrand.support_radius =
        std::min(f.support_radius, geo.center.norm() + geo.radius);
    return quad::integrate_ball(integrand, geo.center, geo.radius, cfg).value;
}

/// Memoized direct evaluation, shared by the field closures.
struct SolveMemo {
    ScalarField f;
    const green::GreenKernel* kernel;
    quad::QuadConfig cfg;
    mutable std::unordered_map<Vec, double, VecHash> cache;
    mutable std::shared_mutex mutex;

    double operator()(const Vec& x) const {
        {
            std::shared_lock lock(mutex);
            auto it = cache.find(x);
            if (it != cache.end()) return it->second;
        }
        const double v = solve_value_direct(f, *kernel, cfg, x);
        std::unique_lock lock(mutex);
        return cache.emplace(x, v).first->second;
    }
};

/// Monotone cubic (Fritsch-Carlson) interpolant.
struct Pchip {
    std::vector<double> x, y, d;

    void build() {
        const size_t n = x.size();
        d.assign(n, 0.0);
        std::vector<double> del(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) del[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        d[0] = del[0];
        d[n - 1] = del[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
    }
    double eval(double xx) const {
        const size_t n = x.size();
        if (xx <= x[0]) return y[0] + d[0] * (xx - x[0]);
        if (xx >= x[n - 1]) return y[n - 1] + d[n - 1] * (xx - x[n - 1]);
        size_t j = static_cast<size_t>(std::upper_bound(x.begin(), x.end(), xx) - x.begin()) - 1;
        j = std::min(j, n - 2);
        const double h = x[j + 1] - x[j], u = (xx - x[j]) / h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * y[j] + h10 * h * d[j] + h01 * y[j + 1] + h11 * h * d[j + 1];
    }
};

/// Radial solution table in (log delta, log u); usable for positive radial
/// data on the origin-centered geometry.
class RadialSolution {
public:
    bool valid = false;
    double validation_error = 0.0;

    void build(const ScalarField& f, const green::GreenKernel& k, const quad::QuadConfig& cfg) {
        const auto& geo = k.geometry();
        if (!f.radial || geo.center.norm() != 0.0) return;
        const double R = geo.radius;
        const double ld_lo = std::log(R * std::pow(2.0, -24)), ld_hi = std::log(R);
        const int n = 300;
        interp_.x.resize(n);
        interp_.y.resize(n);
        for (int i = 0; i < n; ++i) {
            const double ld = ld_hi + (ld_lo - ld_hi) * i / (n - 1);  // descending toward the boundary
            const double r = R - std::exp(ld);
            Vec x = Vec::zero(geo.center.dim);
            x[0] = r;
            const double u = solve_value_direct(f, k, cfg, x);
            if (!(u > 0.0) || !std::isfinite(u)) return;  // table needs positive values
            interp_.x[static_cast<size_t>(n - 1 - i)] = ld;
            interp_.y[static_cast<size_t>(n - 1 - i)] = std::log(u);
        }
        interp_.build();
        // spot validation against direct quadrature
        for (int j = 0; j < 8; ++j) {
            const double ld = ld_lo + (ld_hi - ld_lo) * radical_inverse(static_cast<uint64_t>(j) + 7, 2);
            const double r = R - std::exp(ld);
            Vec x = Vec::zero(geo.center.dim);
            x[0] = r;
            const double direct = solve_value_direct(f, k, cfg, x);
            const double tabbed = std::exp(interp_.eval(ld));
            if (direct > 0.0)
                validation_error = std::max(validation_error,
                                            std::abs(tabbed - direct) / direct);
        }
        valid = validation_error < 1e-3;
        radius_ = R;
    }

    double eval_radius(double r) const {
        if (r >= radius_) return 0.0;
        return std::exp(interp_.eval(std::log(radius_ - r)));
    }

private:
    Pchip interp_;
    double radius_ = 1.0;
};

/// Evaluation access used by the scan machinery: radial table when
/// available, memoized direct quadrature otherwise.
struct SolutionAccess {
    std::shared_ptr<SolveMemo> memo;
    std::shared_ptr<RadialSolution> radial;

    SolutionAccess(const ScalarField& f, const green::GreenKernel& k, const quad::QuadConfig& cfg,
                   bool accelerate) {
        memo = std::make_shared<SolveMemo>();
        memo->f = f;
        memo->kernel = &k;
        memo->cfg = cfg;
        if (accelerate && f.radial) {
            radial = std::make_shared<RadialSolution>();
            radial->build(f, k, cfg);
            if (!radial->valid) radial.reset();
        }
    }

    double operator()(const Vec& x) const {
        if (radial) return radial->eval_radius(x.norm());
        return (*memo)(x);
    }

    ScalarField as_field(const green::GreenKernel& k) const {
        ScalarField u;
        const auto self = *this;
        u.eval = [self](const Vec& x) { return self(x); };
        u.support_radius = k.geometry().center.norm() + k.geometry().radius;
        u.interior_smooth = true;
        u.holder_exponent = k.params().s;
        u.radial = static_cast<bool>(radial);
        return u;
    }
};

}  // namespace

ScalarField solve_green(const ScalarField& f, const green::GreenKernel& k,
                        const quad::QuadConfig& cfg) {
    auto memo = std::make_shared<SolveMemo>();
    memo->f = f;
    memo->kernel = &k;
    memo->cfg = cfg;
    ScalarField u;
    u.eval = [memo](const Vec& x) { return (*memo)(x); };
    u.support_radius = k.geometry().center.norm() + k.geometry().radius;
    u.interior_smooth = true;
    u.holder_exponent = k.params().s;
    u.radial = f.radial;
    return u;
}

// ---------------------------------------------------------------------------
// shell scans
// ---------------------------------------------------------------------------

NormScan shell_scan(const std::function<double(const Vec&)>& value, const ScanSpec& spec,
                    int threads) {
    if (spec.p_grid.empty()) throw std::invalid_argument("shell_scan: empty exponent grid");
    const int K = spec.shells;
    const int nR = spec.radial_nodes_per_shell;
    const int M = spec.radial ? 1 : spec.angular_nodes;

    std::vector<double> gx, gw;
    quad::gauss_legendre(nR, gx, gw);
    std::vector<double> cx, cw;
    quad::gauss_legendre(std::max(24, 2 * nR), cx, cw);

    struct Sample {
        double w, a;
    };
    // region 0 = core, regions 1..K = shells
    std::vector<std::vector<Sample>> samples(static_cast<size_t>(K) + 1);
    std::vector<double> sup(static_cast<size_t>(K) + 1, 0.0);

    parallel_for(K + 1, threads, [&](int region) {
        const double lo = region == 0 ? 0.0 : 1.0 - std::pow(2.0, -region);
        const double hi = region == 0 ? 0.5 : 1.0 - std::pow(2.0, -region - 1);
        const auto& nx = region == 0 ? cx : gx;
        const auto& nw = region == 0 ? cw : gw;
        auto& out = samples[static_cast<size_t>(region)];
        out.reserve(nx.size() * static_cast<size_t>(M));
        for (size_t i = 0; i < nx.size(); ++i) {
            const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nx[i];
            const double wr = 0.5 * (hi - lo) * nw[i] * r;  // polar weight, N = 2
            for (int j = 0; j < M; ++j) {
                Vec x = spec.radial ? Vec{r, 0.0} : r * unit2(2.0 * kPi * (j + 0.5) / M);
                const double a = std::abs(value(x));
                out.push_back({wr * (2.0 * kPi / M), a});
                sup[static_cast<size_t>(region)] = std::max(sup[static_cast<size_t>(region)], a);
            }
        }
    });

    NormScan scan;
    scan.label = spec.label;
    scan.shell_count = K;
    scan.shell_sup.assign(sup.begin() + 1, sup.end());
    for (double p : spec.p_grid) {
        NormEntry e;
        e.p = p;
        e.shell_contributions.resize(static_cast<size_t>(K), 0.0);
        for (int region = 0; region <= K; ++region) {
            double c = 0.0;
            for (const auto& s : samples[static_cast<size_t>(region)])
                c += s.w * std::pow(s.a, p);
            if (region == 0)
                e.core_contribution = c;
            else
                e.shell_contributions[static_cast<size_t>(region - 1)] = c;
        }
        // weak quasinorm from the pooled samples: sup_j a_j^p W(a >= a_j)
        std::vector<Sample> pool;
        for (const auto& v : samples) pool.insert(pool.end(), v.begin(), v.end());
        std::sort(pool.begin(), pool.end(), [](const Sample& l, const Sample& r) { return l.a > r.a; });
        double W = 0.0, weak = 0.0;
        for (const auto& s : pool) {
            W += s.w;
            weak = std::max(weak, std::pow(s.a, p) * W);
        }
        e.weak_quasinorm = std::pow(weak, 1.0 / p);
        scan.entries.push_back(std::move(e));
    }
    threshold_detect(scan);
    for (auto& e : scan.entries) {
        double total = e.core_contribution + e.tail_extrapolation;
        for (double c : e.shell_contributions) total += c;
        e.norm_estimate = std::pow(total, 1.0 / e.p);
    }
    return scan;
}

namespace {

/// Classify one contribution sequence: extrapolate the deepest log-ratios
/// (Aitken) and compare the limit against the flat line.
struct ShellTrend {
    bool divergent = false;
    double limit_ratio = 1.0;  // extrapolated c_{k+1}/c_k
};

ShellTrend classify_shells(const std::vector<double>& c) {
    ShellTrend tr;
    std::vector<double> lr;
    for (size_t i = 0; i + 1 < c.size(); ++i) {
        if (c[i] <= 1e-290 || c[i + 1] <= 1e-290) break;
        lr.push_back(std::log(c[i + 1] / c[i]));
    }
    if (lr.empty()) {
        tr.divergent = false;
        tr.limit_ratio = 0.0;
        return tr;
    }
    double xinf = lr.back();
    if (lr.size() >= 3) {
        const double x0 = lr[lr.size() - 3], x1 = lr[lr.size() - 2], x2 = lr[lr.size() - 1];
        const double den = x2 - 2.0 * x1 + x0;
        if (std::abs(den) > 1e-6 * (std::abs(x2) + 1e-9)) {
            const double ait = x2 - (x2 - x1) * (x2 - x1) / den;
            // only trust the extrapolation when the transient is geometric
            // (same-sign, shrinking differences)
            if ((x1 - x0) * (x2 - x1) > 0.0 && std::abs(x2 - x1) < std::abs(x1 - x0))
                xinf = ait;
        }
    }
    constexpr double kBand = 0.02;
    tr.limit_ratio = std::exp(xinf);
    tr.divergent = xinf >= -kBand;
    return tr;
}

}  // namespace

std::optional<double> threshold_detect(NormScan& scan) {
    if (scan.shell_count < 4)
        throw std::invalid_argument("threshold_detect: need at least 4 boundary shells");
    std::vector<char> div(scan.entries.size(), 0);
    for (size_t i = 0; i < scan.entries.size(); ++i) {
        auto& e = scan.entries[i];
        const ShellTrend tr = classify_shells(e.shell_contributions);
        e.converged = !tr.divergent;
        div[i] = tr.divergent ? 1 : 0;
        if (!tr.divergent && !e.shell_contributions.empty()) {
            const double q = std::clamp(tr.limit_ratio, 0.0, 0.95);
            e.tail_extrapolation = e.shell_contributions.back() * q / (1.0 - q);
        }
    }
    scan.detected_threshold.reset();
    for (size_t i = 1; i < div.size(); ++i) {
        if (!div[i - 1] && div[i]) {
            scan.detected_threshold = 0.5 * (scan.entries[i - 1].p + scan.entries[i].p);
            break;
        }
    }
    if (!scan.detected_threshold && !div.empty() && div.front() && !div.back()) {
        // decreasing grids are not expected; keep the first crossover rule
    }
    return scan.detected_threshold;
}

// ---------------------------------------------------------------------------
// flap paths
// ---------------------------------------------------------------------------

quad::QuadResult flap_solution_kernel_path(const ScalarField& f, const green::GreenKernel& k,
                                           double t, const Vec& x, const quad::QuadConfig& cfg) {
    const auto& geo = k.geometry();
    if (!geo.contains(x))
        throw std::domain_error("flap_solution_kernel_path: x must be interior");
    const int N = x.dim;
    const double s = k.params().s;

    quad::QuadConfig inner = cfg;
    inner.abs_tol = std::max(cfg.abs_tol * 1e2, 1e-11);
    inner.rel_tol = std::max(cfg.rel_tol * 1e2, 1e-7);

    const double r_cut = 1e-9;
    auto integrand = [&](const Vec& y) {
        const double d = distance(x, y);
        if (d < r_cut || !geo.contains(y)) return 0.0;
        const double fv = f(y);
        if (fv == 0.0) return 0.0;
        return green::frac_laplacian_of_kernel(k, t, x, y, inner, 0.5 * r_cut).value * fv;
    };
    const Vec c = geo.center;
    const double R = geo.radius;
    const double supp = std::min(f.support_radius, c.norm() + R);
    const Vec origin = Vec::zero(N);
    auto segments = [=](const Vec& w) {
        quad::RaySegments seg;
        RayInterval dom = ray_ball_intersection(x, w, c, R);
        if (dom.empty()) return seg;
        if (std::isfinite(supp)) {
            const RayInterval sb = ray_ball_intersection(x, w, origin, supp);
            if (sb.empty()) return seg;
            dom.lo = std::max(dom.lo, sb.lo);
            dom.hi = std::min(dom.hi, sb.hi);
        }
        dom.lo = std::max(dom.lo, r_cut);
        seg.add(dom);
        return seg;
    };
    quad::QuadConfig outer = cfg;
    outer.rel_tol = std::max(cfg.rel_tol, 1e-5);
    outer.abs_tol = std::max(cfg.abs_tol, 1e-8);
    quad::QuadResult res = quad::integrate_polar(N, x, integrand, segments, outer,
                                                 N - (2.0 * s - t));

    // truncation remainder of the excluded diagonal disk, bounded through the
    // measured local coefficient of the kernel-derivative singularity
    double qloc = 0.0;
    for (int j = 0; j < 4; ++j) {
        Vec y = x + (2.0 * r_cut) * unit2(0.25 * kPi + 0.5 * kPi * j);
        if (!geo.contains(y)) continue;
        const double v = std::abs(green::frac_laplacian_of_kernel(k, t, x, y, inner, 0.5 * r_cut).value);
        qloc = std::max(qloc, v * std::pow(2.0 * r_cut, N - (2.0 * s - t)));
    }
    const double e = 2.0 * s - t;
    const double fmax_loc = std::abs(f(x)) + 1e-12;
    const double rem = qloc * fmax_loc * 2.0 * kPi * std::pow(r_cut, e) *
                       (1.0 / e + std::abs(std::log(r_cut)));
    res.err_est += rem;
    return res;
}

ops::OperatorResult flap_solution_operator_path(const ScalarField& f, const green::GreenKernel& k,
                                                double t, const Vec& x,
                                                const quad::QuadConfig& cfg) {
    SolutionAccess acc(f, k, cfg, true);
    ops::OperatorRequest req;
    req.field = acc.as_field(k);
    req.order = t;
    req.eval_point = x;
    req.cfg = cfg;
    req.cfg.rel_tol = std::max(cfg.rel_tol, 1e-6);
    req.cfg.abs_tol = std::max(cfg.abs_tol, 1e-9);
    req.domain = k.geometry();
    return ops::frac_laplacian_pv(req);
}

FlapPaths flap_solution(const ScalarField& f, const green::GreenKernel& k, double t, const Vec& x,
                        const quad::QuadConfig& cfg) {
    FlapPaths out;
    quad::QuadResult kp = flap_solution_kernel_path(f, k, t, x, cfg);
    ops::OperatorResult op = flap_solution_operator_path(f, k, t, x, cfg);
    out.kernel_path = kp.value;
    out.operator_path = op.value;
    const double scale = std::max({std::abs(kp.value), std::abs(op.value), 1e-300});
    out.rel_discrepancy = std::abs(kp.value - op.value) / scale;
    out.converged = kp.converged && op.converged;
    return out;
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

NormEntry lp_norm(const ScalarField& field, double p, const Region& region,
                  const quad::QuadConfig& cfg, int shells) {
    if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
    if (region.kind == Region::Kind::Ball) {
        if (std::isinf(p)) {
            NormEntry e;
            e.p = p;
            ScanSpec spec;
            spec.p_grid = {1.0};
            spec.shells = shells;
            spec.radial = field.radial;
            NormScan s = shell_scan([&](const Vec& x) { return field(x); }, spec);
            e.norm_estimate = 0.0;
            for (double v : s.shell_sup) e.norm_estimate = std::max(e.norm_estimate, v);
            e.converged = true;
            return e;
        }
        ScanSpec spec;
        spec.p_grid = {p};
        spec.shells = shells;
        spec.radial = field.radial;
        NormScan s = shell_scan([&](const Vec& x) { return field(x); }, spec);
        return s.entries.front();
    }
    // annular shell / exterior ring: plain polar integral of |f|^p
    NormEntry e;
    e.p = p;
    const int N = 2;
    const Vec origin = Vec::zero(N);
    auto integrand = [&](const Vec& x) { return std::pow(std::abs(field(x)), p); };
    auto segs = [&](const Vec&) {
        quad::RaySegments s;
        s.add({region.r0, region.r1});
        return s;
    };
    quad::QuadResult r = quad::integrate_polar(N, origin, integrand, segs, cfg);
    e.norm_estimate = std::pow(std::max(0.0, r.value), 1.0 / p);
    e.converged = r.converged;
    return e;
}

WeightedNorms weighted_norms(const ScalarField& f, const green::GreenKernel& k, double t,
                             const std::vector<double>& p_grid, const std::vector<double>& q_grid,
                             const quad::QuadConfig& cfg, int shells, int threads) {
    const double s = k.params().s;
    SolutionAccess acc(f, k, cfg, true);
    ScalarField u = acc.as_field(k);

    quad::QuadConfig op_cfg = cfg;
    op_cfg.rel_tol = std::max(cfg.rel_tol, 1e-5);
    op_cfg.abs_tol = std::max(cfg.abs_tol, 1e-8);

    auto flap_at = [&](double order, const Vec& x) {
        ops::OperatorRequest req;
        req.field = u;
        req.order = order;
        req.eval_point = x;
        req.cfg = op_cfg;
        req.domain = k.geometry();
        return ops::frac_laplacian_pv(req).value;
    };

    WeightedNorms out;
    out.thresholds = exponents(k.params(), t);

    ScanSpec spec1;
    spec1.p_grid = p_grid;
    spec1.shells = shells;
    spec1.radial = f.radial;
    spec1.label = "log-weighted s/2-laplacian";
    out.log_weighted = shell_scan(
        [&](const Vec& x) {
            const double dl = std::abs(std::log(k.geometry().delta(x)));
            return flap_at(s, x) / std::max(dl, 1e-12);
        },
        spec1, threads);

    ScanSpec spec2;
    spec2.p_grid = q_grid;
    spec2.shells = shells;
    spec2.radial = f.radial;
    spec2.label = "distance-weighted t/2-laplacian";
    out.dist_weighted = shell_scan(
        [&](const Vec& x) {
            return std::pow(k.geometry().delta(x), t - s) * flap_at(t, x);
        },
        spec2, threads);
    return out;
}

HardyNorms hardy_norms(const ScalarField& f, const green::GreenKernel& k,
                       const std::vector<double>& r_grid, const std::vector<double>& q_grid,
                       const quad::QuadConfig& cfg, int shells, int threads) {
    SolutionAccess acc(f, k, cfg, true);
    const double s = k.params().s;
    HardyNorms out;
    out.thresholds = exponents(k.params(), std::max(k.params().t, k.params().s));

    ScanSpec spec1;
    spec1.p_grid = r_grid;
    spec1.shells = shells;
    spec1.radial = f.radial;
    spec1.label = "solution";
    out.plain = shell_scan([&](const Vec& x) { return acc(x); }, spec1, threads);

    ScanSpec spec2;
    spec2.p_grid = q_grid;
    spec2.shells = shells;
    spec2.radial = f.radial;
    spec2.label = "solution over delta^s";
    out.hardy = shell_scan(
        [&](const Vec& x) { return acc(x) / std::pow(k.geometry().delta(x), s); }, spec2,
        threads);
    return out;
}

GFunctions g_functions(const ScalarField& f, const Vec& x, double t,
                       const specfun::FracParams& params, const quad::QuadConfig& cfg) {
    const int N = params.N;
    const double s = params.s;
    if (!(x.norm() < 1.0)) throw std::domain_error("g_functions: x must be interior");
    const double e1 = N - (2.0 * s - t);  // kernel exponent of g1, g2
    const double e3 = N - s;

    auto make = [&](int which) {
        ScalarField integrand;
        const ScalarField* fp = &f;
        integrand.eval = [fp, x, which, e1, e3](const Vec& y) {
            const double d = distance(x, y);
            if (d == 0.0) return 0.0;
            const double fv = std::abs((*fp)(y));
            if (fv == 0.0) return 0.0;
            switch (which) {
                case 1: return std::abs(std::log(d)) * std::pow(d, -e1) * fv;
                case 2: return std::pow(d, -e1) * fv;
                default: return std::pow(d, -e3) * fv;
            }
        };
        integrand.singular_points = {x};
        integrand.singular_strength = which == 3 ? e3 : e1;
        integrand.support_radius = std::min(f.support_radius, 1.0);
        return integrand;
    };

    GFunctions out;
    const Vec origin = Vec::zero(N);
    quad::QuadResult r1 = quad::integrate_ball(make(1), origin, 1.0, cfg);
    quad::QuadResult r2 = quad::integrate_ball(make(2), origin, 1.0, cfg);
    quad::QuadResult r3 = quad::integrate_ball(make(3), origin, 1.0, cfg);
    out.g1 = r1.value;
    out.g2 = r2.value;
    out.g3 = r3.value;
    out.converged = r1.converged && r2.converged && r3.converged;
    return out;
}

quad::McResult gagliardo_seminorm(const ScalarField& field, double gamma, double p,
                                  const BallGeometry& enclosing, const quad::QuadConfig& cfg) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gagliardo_seminorm: gamma in (0,1)");
    if (!(p >= 1.0)) throw std::domain_error("gagliardo_seminorm: p >= 1");
    const int N = enclosing.center.dim;

    auto g = [&](const Vec& x, const Vec& y) {
        const double d = distance(x, y);
        if (d == 0.0) return 0.0;
        const double diff = std::abs(field(x) - field(y));
        if (diff == 0.0) return 0.0;
        return std::pow(diff, p) * std::pow(d, -(N + gamma * p));
    };
    const double h = std::isfinite(field.holder_exponent) ? std::min(field.holder_exponent, 1.0)
                                                          : 1.0;
    const double strength = p * (gamma - h);
    quad::McResult mc = quad::mc_integrate_pairs(g, enclosing.center, enclosing.radius, strength, cfg);

    // pairs with one point beyond the enclosing ball reduce to a single
    // integral (twice, by symmetry): 2 int |u(x)|^p T(x) dx with
    // T(x) = int_{|z| > R_enc} |x-z|^{-N-gamma p} dz
    ScalarField outer;
    const ScalarField* fp = &field;
    const BallGeometry enc = enclosing;
    const double expo = gamma * p;
    quad::QuadConfig tail_cfg = cfg;
    tail_cfg.rel_tol = std::max(cfg.rel_tol, 1e-6);
    outer.eval = [fp, enc, expo, p, tail_cfg](const Vec& x) {
        const double v = std::abs((*fp)(x));
        if (v == 0.0) return 0.0;
        const double mass = ops::complement_geometric(x, expo, enc, tail_cfg).value;
        return std::pow(v, p) * mass;
    };
    outer.support_radius = field.support_radius;
    outer.interior_smooth = field.interior_smooth;
    outer.radial = field.radial;
    const double supp = std::isfinite(field.support_radius)
                            ? std::min(field.support_radius, enclosing.radius)
                            : enclosing.radius;
    quad::QuadResult boundary = quad::integrate_ball(outer, enclosing.center, supp, tail_cfg);

    quad::McResult out;
    out.value = mc.value + 2.0 * boundary.value;
    out.std_err = mc.std_err + boundary.err_est;
    out.samples = mc.samples;
    return out;
}

}  // namespace fraclab::poisson
