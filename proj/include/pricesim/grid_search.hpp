#pragma once

#include <cmath>
#include <utility>

namespace pricesim {

struct GridConfig {
    int points = 4001;          // dense-scan resolution
    double refine_tol = 1e-10;  // golden-section interval width target
};

// Maximizes f over [lo, hi]: dense grid scan to find the best cell, then
// golden-section refinement inside the cells bracketing it. Exact value ties
// resolve toward the lower argument (so a flat objective returns lo).
// Returns {argmax, f(argmax)}.
template <typename F>
std::pair<double, double> maximize_scalar(F&& f, double lo, double hi,
                                          const GridConfig& grid = {}) {
    const int n = grid.points;
    const double span = hi - lo;
    int best = 0;
    double best_x = lo;
    double best_v = f(lo);
    for (int j = 1; j < n; ++j) {
        // The last point is forced to hi so representation error in the step
        // cannot push the scan past (or short of) the boundary.
        const double x = (j == n - 1) ? hi : lo + span * j / (n - 1);
        const double v = f(x);
        if (v > best_v) {
            best = j;
            best_x = x;
            best_v = v;
        }
    }

    double a = (best == 0) ? lo : lo + span * (best - 1) / (n - 1);
    double b = (best == n - 1) ? hi : lo + span * (best + 1) / (n - 1);
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > grid.refine_tol) {
        if (fc >= fd) {  // ties keep the left interval: lower-argument bias
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double rx = (fd > fc) ? d : c;
    const double rv = (fd > fc) ? fd : fc;
    if (rv > best_v || (rv == best_v && rx < best_x)) return {rx, rv};
    return {best_x, best_v};
}

}  // namespace pricesim
