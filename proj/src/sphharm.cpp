#include "brt/sphharm.hpp"

#include <cmath>

#include "brt/errors.hpp"

namespace brt {

double legendre_p(int l, double x) {
    if (l < 0) raise(ErrorCode::InternalError, "negative Legendre degree");
    double p0 = 1.0, p1 = x;
    if (l == 0) return p0;
    for (int k = 2; k <= l; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

namespace {

/// Fully normalized associated Legendre N_lm P_l^m(x) with
/// N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!), m >= 0. Stable upward
/// recurrence on the normalized values.
double normalized_assoc_legendre(int l, int m, double x) {
    // P̄_mm = sqrt((2m+1)/(4pi)) prod_{k=1..m} sqrt((2k+1)/(2k)) ... standard
    // closed start: P̄_mm(x) = (-1)^m sqrt((2m+1)/(4pi) (2m-1)!!/(2m)!!) (1-x^2)^{m/2}.
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    if (m > 0) {
        const double sx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
        for (int k = 1; k <= m; ++k)
            pmm *= -sx2 * std::sqrt((2.0 * k + 1.0) / (2.0 * k));
    }
    if (l == m) return pmm;
    double pm1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
    if (l == m + 1) return pm1;
    double plm = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (double(ll) * ll - double(m) * m));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - double(m) * m) /
                                   (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        plm = a * (x * pm1 - b * pmm);
        pmm = pm1;
        pm1 = plm;
    }
    return plm;
}

}  // namespace

double real_spherical_harmonic(int l, int m, Vec3 x) {
    if (l < 0 || std::abs(m) > l) raise(ErrorCode::InternalError, "invalid (l, m)");
    const double r = x.norm();
    const double ct = x.z / r;
    const double phi = std::atan2(x.y, x.x);
    const int am = std::abs(m);
    const double p = normalized_assoc_legendre(l, am, ct);
    if (m == 0) return p;
    const double sqrt2 = std::sqrt(2.0);
    return m > 0 ? sqrt2 * p * std::cos(am * phi) : sqrt2 * p * std::sin(am * phi);
}

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) raise(ErrorCode::InternalError, "Gauss-Legendre order must be positive");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace brt
