#pragma once

#include <cmath>

namespace focsim {

// Maximises a unimodal f on [lo, hi]. Returns the abscissa; the interval
// ends are checked too, so a maximum sitting on a bound is found exactly.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
    const double a = lo;
    const double b = hi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    double best = 0.5 * (lo + hi);
    double f_best = f(best);
    for (double x : {a, b}) {
        const double fx = f(x);
        if (fx > f_best) {
            best = x;
            f_best = fx;
        }
    }
    return best;
}

}  // namespace focsim
