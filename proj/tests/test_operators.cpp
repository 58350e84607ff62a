#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "doctest.h"
#include "fraclab/operators.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/torsion.hpp"

using namespace fraclab;
using namespace fraclab::ops;
using specfun::FracParams;

namespace {

const quad::QuadConfig kCfg;

OperatorRequest make_req(const ScalarField& f, double order, Vec x) {
    OperatorRequest req;
    req.field = f;
    req.order = order;
    req.eval_point = x;
    req.cfg = kCfg;
    req.domain = BallGeometry(2);
    return req;
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("zero field maps to zero") {
    auto r = frac_laplacian_pv(make_req(ScalarField::zero(2), 0.7, Vec{0.2, 0.1}));
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
    auto g = riesz_gradient(make_req(ScalarField::zero(2), 0.7, Vec{0.2, 0.1}));
    CHECK(g.value.norm() < 1e-12);
}

TEST_CASE("torsion equation: order 2s recovers the data") {
    // (the solution of the constant-data problem has s-Laplacian 1)
    for (double s : {0.3, 0.4}) {
        torsion::TorsionClosedForm cf(FracParams::make(2, s, 0.9 * 2.0 * s));
        for (double r : {0.0, 0.45}) {
            auto res = frac_laplacian_pv(make_req(cf.as_field(), 2.0 * s, Vec{r, 0.0}));
            CHECK(std::abs(res.value - 1.0) < 1e-4);
            CHECK(res.converged);
        }
    }
}

TEST_CASE("torsion fractional derivative matches the closed form") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    for (double r : {0.0, 0.3}) {
        const Vec x{r, 0.0};
        auto res = frac_laplacian_pv(make_req(cf.as_field(), 0.8, x));
        const double want = cf.frac_laplacian_closed(0.8, x);
        CHECK(rel_err(res.value, want) < 1e-4);
    }
}

TEST_CASE("smoothness contract is enforced") {
    ScalarField rough;
    rough.eval = [](const Vec& x) { return std::sqrt(std::abs(x[0])); };
    rough.holder_exponent = 0.5;
    CHECK_THROWS_AS(frac_laplacian_pv(make_req(rough, 0.7, Vec{0.0, 0.0})),
                    std::invalid_argument);
    // order below the Hoelder exponent is admissible
    CHECK_NOTHROW(frac_laplacian_pv(make_req(rough, 0.3, Vec{0.3, 0.0})));
}

TEST_CASE("eval point may not sit on a declared singularity") {
    ScalarField f;
    f.eval = [](const Vec& x) { return 1.0 / x.norm(); };
    f.singular_points = {Vec{0.0, 0.0}};
    f.interior_smooth = true;
    CHECK_THROWS_AS(frac_laplacian_pv(make_req(f, 0.5, Vec{0.0, 0.0})), std::domain_error);
}

TEST_CASE("regional operator of a constant vanishes") {
    OperatorRequest req = make_req(ScalarField::constant(3.7), 0.6, Vec{0.4, -0.2});
    auto r = regional_frac_laplacian(req);
    CHECK(std::abs(r.value) < 1e-8);
    CHECK_THROWS_AS(regional_frac_laplacian(make_req(ScalarField::constant(1.0), 0.6, Vec{1.2, 0.0})),
                    std::domain_error);
}

TEST_CASE("complement geometric mass at the center") {
    // int_{|z|>1} |z|^{-2-t} dz = 2 pi / t
    for (double t : {0.5, 0.8}) {
        auto geo = complement_geometric(Vec{0.0, 0.0}, t, BallGeometry(2), kCfg);
        CHECK(rel_err(geo.value, 2.0 * M_PI / t) < 1e-7);
    }
}

TEST_CASE("complement mass bound through the inradius") {
    // mass <= t^{-1} sigma(S^1) delta(x)^{-t} at interior points
    const double t = 0.65;
    const BallGeometry geo(2);
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(77, static_cast<uint64_t>(i));
        const double r = std::sqrt(rng.next_double()) * 0.999;
        const Vec x = r * unit2(2.0 * M_PI * rng.next_double());
        auto mass = complement_geometric(x, t, geo, kCfg);
        const double bound = specfun::sphere_measure(2) / t * std::pow(geo.delta(x), -t);
        CHECK(mass.value <= bound * (1.0 + 1e-6));
    }
}

TEST_CASE("complement term vanishes with the field") {
    ScalarField f;
    f.eval = [](const Vec& x) { return std::max(0.0, 0.25 - x.norm2()); };
    f.support_radius = 0.5;
    f.interior_smooth = true;
    auto r = complement_term(make_req(f, 0.6, Vec{0.8, 0.0}));
    CHECK(r.value == 0.0);
}

TEST_CASE("decomposition: full equals regional plus complement") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    const ScalarField field = cf.as_field();
    for (int i = 0; i < 10; ++i) {
        CounterRng rng(12345, static_cast<uint64_t>(i));
        const double r = 0.85 * std::sqrt(rng.next_double());
        const Vec x = r * unit2(2.0 * M_PI * rng.next_double());
        OperatorRequest req = make_req(field, 0.8, x);
        auto full = frac_laplacian_pv(req);
        auto reg = regional_frac_laplacian(req);
        auto comp = complement_term(req);
        const double tol = full.err_est + reg.err_est + comp.err_est + 1e-6;
        CHECK(std::abs(full.value - (reg.value + comp.value)) <= tol);
    }
}

TEST_CASE("linearity in the field") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.55, 0.7));
    ScalarField a = cf.as_field();
    ScalarField b;
    b.eval = [](const Vec& x) {
        const double r2 = x.norm2();
        return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
    };
    b.support_radius = 1.0;
    b.interior_smooth = true;
    b.holder_exponent = 1.0;
    ScalarField combo;
    combo.eval = [a, b](const Vec& x) { return 1.5 * a.eval(x) - 2.0 * b.eval(x); };
    combo.support_radius = 1.0;
    combo.interior_smooth = true;
    combo.holder_exponent = 0.55;
    const Vec x{0.25, 0.1};
    auto ra = frac_laplacian_pv(make_req(a, 0.7, x));
    auto rb = frac_laplacian_pv(make_req(b, 0.7, x));
    auto rc = frac_laplacian_pv(make_req(combo, 0.7, x));
    CHECK(std::abs(rc.value - (1.5 * ra.value - 2.0 * rb.value)) <=
          2.0 * (1.5 * ra.err_est + 2.0 * rb.err_est + rc.err_est) + 1e-7);
}

TEST_CASE("rotation equivariance") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    ScalarField base;
    // break radial symmetry with an angular modulation that still vanishes
    // at the boundary
    base.eval = [&cf](const Vec& x) {
        return cf.solution(x) * (1.0 + 0.5 * x[0] + 0.25 * x[1] * x[1]);
    };
    base.support_radius = 1.0;
    base.interior_smooth = true;
    base.holder_exponent = 0.6;
    const Vec x0{0.35, 0.15};
    auto r0 = frac_laplacian_pv(make_req(base, 0.7, x0));
    auto g0 = riesz_gradient(make_req(base, 0.7, x0));
    for (int k = 0; k < 20; ++k) {
        CounterRng rng(999, static_cast<uint64_t>(k));
        const double phi = 2.0 * M_PI * rng.next_double();
        const double cph = std::cos(phi), sph = std::sin(phi);
        auto rot = [cph, sph](const Vec& v) {
            return Vec{cph * v[0] - sph * v[1], sph * v[0] + cph * v[1]};
        };
        auto unrot = [cph, sph](const Vec& v) {
            return Vec{cph * v[0] + sph * v[1], -sph * v[0] + cph * v[1]};
        };
        ScalarField rotated;
        rotated.eval = [&base, unrot](const Vec& x) { return base.eval(unrot(x)); };
        rotated.support_radius = 1.0;
        rotated.interior_smooth = true;
        rotated.holder_exponent = 0.6;
        auto rk = frac_laplacian_pv(make_req(rotated, 0.7, rot(x0)));
        CHECK(std::abs(rk.value - r0.value) < 5e-6 + 5.0 * (rk.err_est + r0.err_est));
        auto gk = riesz_gradient(make_req(rotated, 0.7, rot(x0)));
        const Vec want = rot(g0.value);
        CHECK(distance(gk.value, want) < 1e-4 + 5.0 * (gk.err_est + g0.err_est));
    }
}

TEST_CASE("riesz gradient of radial fields vanishes at the center") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    auto g = riesz_gradient(make_req(cf.as_field(), 0.7, Vec{0.0, 0.0}));
    CHECK(g.value.norm() < 1e-6);
}

TEST_CASE("riesz gradient against a dense product-rule oracle") {
    torsion::TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    const ScalarField field = cf.as_field();
    const double t = 0.7;
    const Vec x{0.3, 0.0};
    auto g = riesz_gradient(make_req(field, t, x));
    CHECK(std::abs(g.value[1]) < 1e-6);

    // oracle: brute-force polar product rule of mu int r^{-1-t} V(r) dr with
    // V(r) the first angular moment of the field about x (the centered term
    // drops out by oddness)
    const double mu = specfun::norm_const_gradient(2, t);
    const int MR = 4000, MA = 512;
    double acc = 0.0;
    const double rmax = 1.0 + x.norm();
    for (int i = 0; i < MR; ++i) {
        const double frac = (i + 0.5) / MR;
        const double r = rmax * frac * frac;  // graded toward zero
        const double dr = rmax * 2.0 * frac / MR;
        double ang = 0.0;
        for (int j = 0; j < MA; ++j) {
            const Vec w = unit2(2.0 * M_PI * (j + 0.5) / MA);
            ang += w[0] * field(x + r * w);
        }
        ang *= 2.0 * M_PI / MA;
        acc += std::pow(r, -t - 1.0) * ang * dr;
    }
    const double oracle = mu * acc;
    CHECK(rel_err(g.value[0], oracle) < 1e-3);
}

TEST_CASE("kernel norm constant matches the half-order convention") {
    // the operator with kernel |x-y|^{-(N+order)} carries the constant of
    // order/2; spot value at order = 1.0 is a_{2,1/2} = 1/(2 pi)
    CHECK(rel_err(kernel_norm_const(2, 1.0), 1.0 / (2.0 * M_PI)) < 1e-13);
}

}  // TEST_SUITE
