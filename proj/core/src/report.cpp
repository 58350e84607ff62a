#include "fraclab/report.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "fraclab/parallel.hpp"

namespace fraclab {

int default_threads() {
    if (const char* env = std::getenv("FRACLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(hw == 0 ? 1 : std::min(hw, 8u));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need two same-length samples");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    LineFit f;
    f.n = n;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

const char* regime_name(RegimeReport::Label label) {
    switch (label) {
        case RegimeReport::Label::Bounded: return "bounded";
        case RegimeReport::Label::Logarithmic: return "logarithmic";
        case RegimeReport::Label::Power: return "power";
    }
    return "unknown";
}

}  // namespace fraclab
