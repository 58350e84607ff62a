#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <limits>

#include "doctest.h"
#include "fraclab/torsion.hpp"

using namespace fraclab;
using namespace fraclab::torsion;
using specfun::FracParams;

namespace {
double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_SUITE("torsion") {

TEST_CASE("solution values and support") {
    TorsionClosedForm cf(FracParams::make(2, 0.5, 0.4));
    CHECK(rel_err(cf.solution(Vec{0.0, 0.0}), 2.0 / M_PI) < 1e-13);
    CHECK(cf.solution(Vec{1.0, 0.0}) == 0.0);
    CHECK(cf.solution(Vec{1.3, -0.4}) == 0.0);
    // value / (1-|x|^2)^s approaches the prefactor at the boundary
    const double r2 = 1.0 - 1e-8;
    const double v = cf.solution(Vec{std::sqrt(r2), 0.0});
    CHECK(rel_err(v / std::pow(1.0 - r2, 0.5), cf.prefactor()) < 1e-6);

    TorsionClosedForm cf6(FracParams::make(2, 0.6, 0.8));
    CHECK(rel_err(cf6.prefactor(), 0.545205176088675315312195208416) < 1e-13);
}

TEST_CASE("radial symmetry") {
    TorsionClosedForm cf(FracParams::make(2, 0.7, 0.9));
    for (int j = 0; j < 8; ++j) {
        const double th = 2.0 * M_PI * j / 8.0;
        const double a = cf.solution(0.55 * unit2(th)), b = cf.solution(Vec{0.55, 0.0});
        CHECK(std::abs(a - b) <= 4e-16 * std::abs(b));
    }
}

TEST_CASE("sign convention pinned by the t = 2s identity") {
    for (double s : {0.3, 0.45, 0.6}) {
        TorsionClosedForm cf(FracParams::make(2, s, 0.9 * std::min(1.0, 2.0 * s)));
        CHECK(cf.sign_convention() == +1);
        for (int i = 0; i < 50; ++i) {
            const double r = 0.02 + 0.95 * i / 49.0;
            const double v = cf.frac_laplacian_closed(2.0 * s, Vec{r, 0.0});
            CHECK(std::abs(v - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("closed-form fractional derivative: interior-only domain") {
    TorsionClosedForm cf(FracParams::make(2, 0.6, 0.8));
    CHECK_THROWS_AS(cf.frac_laplacian_closed(0.8, Vec{1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(cf.frac_laplacian_closed(2.0, Vec{0.3, 0.0}), std::domain_error);
}

TEST_CASE("boundary rate, t > s") {
    TorsionClosedForm cf(FracParams::make(2, 0.5, 0.75));
    const auto br = cf.boundary_rate(0.75);
    CHECK(br.rate_exponent == doctest::Approx(-0.25));
    CHECK_FALSE(br.log_flag);
    // frozen from the Gamma-ratio product (sign resolved to +1)
    CHECK(rel_err(br.limit_constant, -0.419052487844975686891496612042) < 1e-12);

    TorsionClosedForm cf2(FracParams::make(2, 0.6, 0.8));
    const auto br2 = cf2.boundary_rate(0.8);
    CHECK(rel_err(br2.limit_constant, -0.728529773252225513387655593282) < 1e-12);

    // finite and nonzero across admissible orders
    for (double t : {0.55, 0.62, 0.7, 0.74}) {
        TorsionClosedForm c(FracParams::make(2, 0.5, t));
        const auto b = c.boundary_rate(t);
        CHECK(std::isfinite(b.limit_constant));
        CHECK(std::abs(b.limit_constant) > 1e-8);
    }
    CHECK_THROWS_AS(cf.boundary_rate(0.3), std::domain_error);
}

TEST_CASE("boundary rate, t = s (logarithmic)") {
    TorsionClosedForm cf(FracParams::make(2, 0.5, 0.5 + 1e-9));
    const auto br = cf.boundary_rate(0.5);
    CHECK(br.log_flag);
    CHECK(br.rate_exponent == 0.0);
    CHECK(rel_err(br.limit_constant, -0.179587122125166561689081983628) < 1e-11);
}

TEST_CASE("convergence to the boundary limit, t > s") {
    // The limit is approached at the rate w^{t-s} set by the subleading
    // connection-formula branch, whose coefficient is order one; the
    // deviation is monotone in w and only drops below 1% once
    // w^{t-s} |sec/main| does.
    TorsionClosedForm cf(FracParams::make(2, 0.5, 0.7));
    const auto br = cf.boundary_rate(0.7);
    double prev = kInf;
    for (int k = 3; k <= 6; ++k) {
        const double w = std::pow(10.0, -k);
        const double dev =
            std::abs(cf.frac_laplacian_closed_w(0.7, w) * std::pow(w, 0.2) - br.limit_constant) /
            std::abs(br.limit_constant);
        CHECK(dev < prev);
        prev = dev;
    }
    const double w_deep = 1e-12;
    const double dev_deep =
        std::abs(cf.frac_laplacian_closed_w(0.7, w_deep) * std::pow(w_deep, 0.2) -
                 br.limit_constant) /
        std::abs(br.limit_constant);
    CHECK(dev_deep < 0.01);
}

TEST_CASE("convergence to the boundary limit, t = s") {
    TorsionClosedForm cf(FracParams::make(2, 0.5, 0.5 + 1e-9));
    const auto br = cf.boundary_rate(0.5);
    double prev = kInf;
    for (int k = 3; k <= 6; ++k) {
        const double w = std::pow(10.0, -k);
        const double dev =
            std::abs(cf.frac_laplacian_closed_w(0.5, w) / (-std::log(w)) - br.limit_constant) /
            std::abs(br.limit_constant);
        CHECK(dev < prev);
        prev = dev;
    }
    // the log-case correction decays like 1/|log w|
    const double w_deep = 1e-80;
    const double dev_deep =
        std::abs(cf.frac_laplacian_closed_w(0.5, w_deep) / (-std::log(w_deep)) -
                 br.limit_constant) /
        std::abs(br.limit_constant);
    CHECK(dev_deep < 0.025);
}

TEST_CASE("integrability classifier") {
    const FracParams p = FracParams::make(2, 0.5, 0.7);
    CHECK(integrability_class(p, 0.7, 4.5) == IntegrabilityClass::FiniteOnRN);
    CHECK(integrability_class(p, 0.7, 5.5) == IntegrabilityClass::InfiniteOnBall);
    CHECK(integrability_class(p, 0.7, 5.0) == IntegrabilityClass::InfiniteOnBall);
    CHECK(integrability_class(p, 0.5, kInf) == IntegrabilityClass::FiniteOnRN_NotLinfty);
    CHECK(integrability_class(p, 0.5, 40.0) == IntegrabilityClass::FiniteOnRN);
    CHECK(integrability_class(p, 0.3, kInf) == IntegrabilityClass::FiniteOnRN);
    CHECK(integrability_class(p, 0.3, 2.0) == IntegrabilityClass::FiniteOnRN);
}

TEST_CASE("classifier is monotone in p") {
    const FracParams p = FracParams::make(2, 0.5, 0.7);
    bool hit_infinite = false;
    for (double q = 1.0; q <= 16.0; q += 0.25) {
        const auto c = integrability_class(p, 0.7, q);
        if (hit_infinite) CHECK(c == IntegrabilityClass::InfiniteOnBall);
        if (c == IntegrabilityClass::InfiniteOnBall) hit_infinite = true;
    }
    CHECK(hit_infinite);
}

}  // TEST_SUITE
