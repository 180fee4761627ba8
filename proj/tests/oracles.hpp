#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately separate from the library code paths they check.

#include <cmath>
#include <functional>

namespace oracles {

/// Adaptive Simpson with Richardson correction; independent of the
/// library's fixed-node composite rule.
inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double tol,
                                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// P_l(0) by the double-factorial closed form: 0 for odd l,
/// (-1)^{l/2} (l-1)!! / l!! for even l.
inline double legendre_p0_closed_form(int l) {
    if (l % 2 == 1) return 0.0;
    double value = 1.0;
    for (int k = 2; k <= l; k += 2) value *= static_cast<double>(k - 1) / k;
    return (l / 2) % 2 == 0 ? value : -value;
}

/// Dense trapezoid line integral; a deliberately different rule from the
/// library's Simpson for cross-checking Radon values.
inline double dense_trapezoid(const std::function<double(double)>& f, double a, double b,
                              int nodes) {
    const double h = (b - a) / (nodes - 1);
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < nodes - 1; ++i) sum += f(a + h * i);
    return sum * h;
}

}  // namespace oracles
