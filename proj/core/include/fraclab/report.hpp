#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fraclab {

/// Ordinary least-squares line fit y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Outcome of an empirical sup-ratio estimation for an inequality under
/// test: the constant estimate, its stability under sample doubling, and
/// whatever regression diagnostics the check produced.
struct EstimateReport {
    std::string check_id;
    double sup_ratio = 0.0;        ///< over the full sample
    double sup_ratio_half = 0.0;   ///< over the first half (doubling diagnostic)
    double stability = 0.0;        ///< |full - half| / full
    bool sample_stable = false;    ///< stability <= 10%
    double empirical_C = 0.0;      ///< the constant the inequality needs
    std::optional<double> fitted_exponent;
    std::optional<double> fit_r2;
    long sample_count = 0;
    bool all_finite = true;
    bool quadrature_clean = true;  ///< no non-converged quadrature flags
    std::vector<double> ratios;    ///< per-sample ratios (diagnostics)
    std::string note;
};

/// Classification of an integral's growth regime in a scan parameter.
struct RegimeReport {
    enum class Label { Bounded, Logarithmic, Power };
    Label regime_label = Label::Bounded;
    double fitted_exponent = 0.0;  ///< slope in the fitted coordinates
    double fit_r2 = 0.0;
    double empirical_C = 0.0;
    double max_min_ratio = 0.0;  ///< bounded-regime diagnostic
    std::string sample_meta;
};

const char* regime_name(RegimeReport::Label label);

}  // namespace fraclab
