#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "fraclab/vec.hpp"

namespace fraclab {

/// Interval of ray parameters [lo, hi]; empty when hi < lo.
struct RayInterval {
    double lo = 0.0, hi = -1.0;
    bool empty() const { return hi < lo; }
};

/// Parameters r with |p + r w - c| <= R, for a unit direction w.
/// Returns the (possibly empty) intersection with r >= 0.
inline RayInterval ray_ball_intersection(const Vec& p, const Vec& w, const Vec& c, double R) {
    const Vec d = p - c;
    const double b = dot(w, d);
    const double disc = b * b + R * R - d.norm2();
    if (disc <= 0.0) return {};
    const double sq = std::sqrt(disc);
    const double lo = std::max(0.0, -b - sq);
    const double hi = -b + sq;
    if (hi <= lo) return {};
    return {lo, hi};
}

/// The working domain: a ball, together with the enclosing radius R used by
/// the far-field machinery. For the unit ball at the origin R is exactly 3.
struct BallGeometry {
    Vec center;
    double radius = 1.0;

    explicit BallGeometry(int dim = 2, Vec c = {}, double r = 1.0) : center(c), radius(r) {
        if (center.dim == 0) center = Vec::zero(dim);
    }

    /// 1/3 + 4/3 (diam + dist(0, domain)); the ball is compactly inside B_R(0).
    double enclosing_R() const {
        const double dist0 = std::max(0.0, center.norm() - radius);
        return 1.0 / 3.0 + 4.0 / 3.0 * (2.0 * radius + dist0);
    }

    double delta(const Vec& x) const { return radius - distance(x, center); }
    bool contains(const Vec& x) const { return distance(x, center) < radius; }

    /// Exit parameter of the ray x + r w from an interior point x.
    double exit_radius(const Vec& x, const Vec& w) const {
        const Vec d = x - center;
        const double b = dot(w, d);
        return -b + std::sqrt(b * b + radius * radius - d.norm2());
    }
};

}  // namespace fraclab
