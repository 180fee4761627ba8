#pragma once

#include <utility>
#include <vector>

#include "brt/geom.hpp"

namespace brt {

/// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

/// Orthonormal real spherical harmonic Y_{l,m}(x), |x| = 1. m > 0 are the
/// cosine harmonics, m < 0 the sine ones; normalization integrates to 1 over
/// the sphere.
double real_spherical_harmonic(int l, int m, Vec3 x);

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

}  // namespace brt
