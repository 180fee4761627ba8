#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brt/fields.hpp"
#include "brt/planar.hpp"

namespace brt {

/// Unit-speed geodesic of the flat cylinder [0, L] x S^1 with axial slope b:
/// gamma_b(t) = (b t, angle sqrt(1 - b^2) t), t in [0, L/b].
struct CylinderGeodesic {
    double b{1.0};

    explicit CylinderGeodesic(double slope);
    double duration(double cylinder_length) const { return cylinder_length / b; }
};

struct TubeNullReport {
    int rays{0};
    double max_abs_integral{0.0};
    /// Worst gap between the quadrature value and the per-ray closed form
    /// (integral of g over (0, L) divided by the axial velocity).
    double max_closed_form_mismatch{0.0};
    bool pass{false};
    std::string to_json() const;
};

/// Verify the reflecting-tube null space: f(x, y) = g(y) with zero-mean g
/// integrates to zero over every bottom-to-top broken ray. Raises
/// InvalidNullProfile when the mean of g is not zero (to 1e-10).
TubeNullReport tube_null_check(const RectTube& tube, const RadialProfile& g, int ray_count,
                               std::uint64_t seed = 0, double tolerance = 1e-9,
                               const QuadratureSpec& quad = {256.0});

struct DiskNullReport {
    int orbits{0};
    double max_normalized_residual{0.0};
    bool pass{false};
    std::string to_json() const;
};

/// Verify the disk null space: f(r, theta) = g(r) cos(theta) integrates to
/// zero over every star-polygon orbit with q <= max_q.
DiskNullReport disk_null_check(const RadialProfile& g, int max_q, int phase_count,
                               double tolerance = 1e-9, const QuadratureSpec& quad = {});

/// Attenuated transform of f(x, y) = g(x) over the slope-b cylinder
/// geodesic: integral of exp(-a t) g(b t) over [0, L/b].
double cylinder_att_forward(const RadialProfile& g, double cylinder_length, double a, double b,
                            const QuadratureSpec& quad = {1024.0});

/// Numerical Laplace transform of g (supported on [0, L]) at s.
double laplace_transform(const RadialProfile& g, double cylinder_length, double s,
                         const QuadratureSpec& quad = {1024.0});

struct ProbeReport {
    int modes{0};
    int slopes{0};
    double a{0.0};
    double sigma_min{0.0};
    std::vector<double> null_vector;  // right singular vector of sigma_min
    /// |A v| for the explicit zero-mean candidate direction (first sine mode).
    double null_candidate_residual{0.0};
    std::string to_json() const;
};

/// Numerical injectivity probe of the cylinder transform: map trigonometric
/// profile coefficients to transform values over a slope grid and report the
/// smallest singular value. Evidence, not proof: no analytic lower bound is
/// claimed. Raises UnderdeterminedProbe when modes exceed slopes. Constant
/// attenuation only.
ProbeReport cylinder_injectivity_probe(double a, double cylinder_length, int mode_count,
                                       int slope_count, const QuadratureSpec& quad = {1024.0});

/// The trigonometric probe basis: mode 0 is constant, odd modes are
/// sin(2 pi ceil(j/2) t / L), even modes cos.
RadialProfile probe_basis_profile(int j);

}  // namespace brt
