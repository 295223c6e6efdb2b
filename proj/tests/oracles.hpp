// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used only by the tests.
#pragma once

#include <cmath>
#include <functional>

namespace occsim::test {

// Adaptive Simpson quadrature with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps,
                               int depth = 50) {
    struct Rec {
        static double run(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double eps, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
                return left + right + delta / 15.0;
            }
            return run(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
                   run(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
        }
    };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::run(f, a, b, fa, fm, fb, whole, eps, depth);
}

}  // namespace occsim::test
