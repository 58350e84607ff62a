#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fraclab/vec.hpp"

namespace fraclab {

/// An evaluable real-valued function on R^N with the support and smoothness
/// metadata the integrators need. Carries solutions, data functions and
/// kernel slices.
///
/// Contract: eval is deterministic, and the field vanishes outside
/// B(0, support_radius) when that radius is finite (operator() enforces it).
struct ScalarField {
    std::function<double(const Vec&)> eval;
    double support_radius = std::numeric_limits<double>::infinity();
    bool interior_smooth = false;  ///< C^2 in the interior of the support
    double holder_exponent = std::numeric_limits<double>::quiet_NaN();
    std::vector<Vec> singular_points;
    double singular_strength = 1.0;  ///< |x - p|^{-strength} growth at singular points
    double decay_exponent = 1.0;     ///< tail decay |x|^{-N-decay} beyond the support
    bool radial = false;             ///< value depends on |x| only

    double operator()(const Vec& x) const {
        if (std::isfinite(support_radius) && x.norm() > support_radius) return 0.0;
        return eval(x);
    }

    static ScalarField zero(int dim) {
        ScalarField f;
        f.eval = [](const Vec&) { return 0.0; };
        f.support_radius = 0.0;
        f.interior_smooth = true;
        f.radial = true;
        (void)dim;
        return f;
    }

    static ScalarField constant(double value) {
        ScalarField f;
        f.eval = [value](const Vec&) { return value; };
        f.interior_smooth = true;
        f.radial = true;
        return f;
    }
};

}  // namespace fraclab
