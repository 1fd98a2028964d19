#pragma once

#include "smatch/errors.hpp"

#include <cmath>
#include <cstddef>

namespace smatch {

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
};

/// Minimizes f on [lo, hi]: scan `scan_points` equally spaced abscissae (ties go to the
/// smaller abscissa), then golden-section search inside the bracket around the best scan
/// point until the bracket is narrower than `tol`. The refined point replaces the scan
/// point only when strictly better.
template <class F>
ScalarMinimum minimize_scan_golden(F&& f, double lo, double hi, std::size_t scan_points = 64,
                                   double tol = 1e-8) {
    if (!(lo < hi)) throw ConfigError("minimize_scan_golden: empty interval");
    if (scan_points < 2) throw ConfigError("minimize_scan_golden: need at least 2 scan points");

    const double step = (hi - lo) / static_cast<double>(scan_points - 1);
    auto abscissa = [&](std::size_t i) {
        return i + 1 == scan_points ? hi : lo + static_cast<double>(i) * step;
    };

    std::size_t best_i = 0;
    double best_v = f(lo);
    for (std::size_t i = 1; i < scan_points; ++i) {
        const double v = f(abscissa(i));
        if (v < best_v || (std::isnan(best_v) && !std::isnan(v))) {
            best_v = v;
            best_i = i;
        }
    }
    ScalarMinimum best{abscissa(best_i), best_v};

    double a = best_i == 0 ? lo : abscissa(best_i - 1);
    double b = best_i + 1 == scan_points ? hi : abscissa(best_i + 1);
    constexpr double inv_phi = 0.6180339887498948482;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm < best.value) best = {mid, fm};
    return best;
}

}  // namespace smatch
