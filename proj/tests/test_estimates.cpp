#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "doctest.h"
#include "fraclab/estimates.hpp"

using namespace fraclab;
using namespace fraclab::estimates;

namespace {
const quad::QuadConfig kCfg;

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}
}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("two-weight integral: bounded regime") {
    auto rep = grzywny_scan(2, 0.5, 0.5, 1.0, geometric(1e-4, 1e-1, 10), kCfg);
    CHECK(rep.regime_label == RegimeReport::Label::Bounded);
    CHECK(rep.max_min_ratio <= 2.0);
}

TEST_CASE("two-weight integral: logarithmic regime") {
    auto rep = grzywny_scan(2, 1.5, 0.5, 1.0, geometric(1e-4, 1e-1, 10), kCfg);
    CHECK(rep.regime_label == RegimeReport::Label::Logarithmic);
    CHECK(rep.fit_r2 >= 0.99);
    CHECK(rep.fitted_exponent > 0.0);  // grows with |log d|
}

TEST_CASE("two-weight integral: power regime") {
    auto rep = grzywny_scan(2, 1.5, 1.0, 1.0, geometric(1e-4, 1e-1, 10), kCfg);
    CHECK(rep.regime_label == RegimeReport::Label::Power);
    CHECK(rep.fitted_exponent == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(rep.fit_r2 >= 0.99);
}

TEST_CASE("two-weight integral: swap invariance") {
    const Vec x{0.07, 0.0}, y{-0.07, 0.0};
    auto a = grzywny_integral(2, 1.2, 0.7, 1.0, x, y, kCfg);
    auto b = grzywny_integral(2, 0.7, 1.2, 1.0, y, x, kCfg);
    CHECK(std::abs(a.value - b.value) <= 2.0 * (a.err_est + b.err_est) + 1e-8 * a.value);
    CHECK_THROWS_AS(grzywny_integral(2, 2.0, 0.5, 1.0, x, y, kCfg), std::domain_error);
}

TEST_CASE("distance-weighted integral: all three regimes") {
    auto bounded = tobias_scan(0.6, 0.3, geometric(1e-5, 1e-1, 9), kCfg);
    CHECK(bounded.regime_label == RegimeReport::Label::Bounded);
    CHECK(bounded.max_min_ratio <= 2.0);

    auto logreg = tobias_scan(0.4, 0.4, geometric(1e-5, 1e-1, 9), kCfg);
    CHECK(logreg.regime_label == RegimeReport::Label::Logarithmic);
    CHECK(logreg.fit_r2 >= 0.99);

    auto power = tobias_scan(0.3, 0.6, geometric(1e-5, 1e-1, 9), kCfg);
    CHECK(power.regime_label == RegimeReport::Label::Power);
    CHECK(power.fitted_exponent == doctest::Approx(-0.3).epsilon(0.1));
    CHECK(power.fit_r2 >= 0.99);
}

TEST_CASE("regime grid matches predictions") {
    // 3x3 grid of (alpha, beta) spanning the three regimes
    for (double alpha : {0.4, 0.9, 1.4}) {
        for (double beta : {0.3, 0.6, 1.1}) {
            const double expo = 2.0 - alpha - beta;
            auto rep = grzywny_scan(2, alpha, beta, 1.0, geometric(1e-3, 1e-1, 6), kCfg);
            if (expo > 1e-9)
                CHECK(rep.regime_label == RegimeReport::Label::Bounded);
            else if (std::abs(expo) <= 1e-9)
                CHECK(rep.regime_label == RegimeReport::Label::Logarithmic);
            else
                CHECK(rep.regime_label == RegimeReport::Label::Power);
        }
    }
}

TEST_CASE("elementary inequality: randomized verification") {
    auto rep = mvt_check(100000, 2, 1.0 + 1e-9, 3.0, 2024);
    CHECK(rep.pass);
    CHECK(rep.worst_ratio <= 1.0 + 1e-12);
    CHECK(rep.violations == 0);
    // across dimensions
    for (int dim : {1, 3}) {
        auto r = mvt_check(20000, dim, 1.0 + 1e-9, 3.0, 55);
        CHECK(r.pass);
    }
}

TEST_CASE("elementary inequality: degenerate inputs") {
    // u = w collapses both sides; w = 0 reduces to an algebraic identity
    auto rep = mvt_check(10, 2, 1.5, 2.5, 1);
    CHECK(rep.worst_ratio >= 0.0);
    const double u = 1.7, lambda = 1.8;
    const double lhs = std::pow(u, lambda);
    const double rhs = lambda * std::max(1.0, std::pow(2.0, lambda - 2.0)) *
                       (std::pow(u, lambda - 1.0) + std::pow(u, lambda - 1.0)) * u;
    CHECK(lhs <= rhs);
}

}  // TEST_SUITE
