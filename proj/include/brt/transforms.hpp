#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brt/fields.hpp"
#include "brt/geom.hpp"
#include "brt/planar.hpp"
#include "brt/unfolding.hpp"

namespace brt {

/// Constant (signed) attenuation coefficient; the transform weights by
/// exp(h * arclength), so decay means h < 0.
struct AttenuationSpec {
    double h{0.0};
};

enum class CellMask : unsigned char { Measured = 0, Excluded = 1, Interpolated = 2 };

const char* cell_mask_name(CellMask mask);

/// Table of line integrals over normal angles [0, pi) and signed offsets
/// [-s_max, s_max], with a per-cell validity mask.
struct Sinogram {
    int n_angles{0};
    int n_offsets{0};
    double s_max{0.0};
    std::vector<double> values;   // [angle][offset]
    std::vector<CellMask> mask;

    Sinogram() = default;
    Sinogram(int angles, int offsets, double smax);

    double angle(int a) const { return kPi * a / n_angles; }
    double offset(int j) const {
        return n_offsets == 1 ? 0.0 : -s_max + 2.0 * s_max * j / (n_offsets - 1);
    }
    double offset_step() const { return 2.0 * s_max / (n_offsets - 1); }
    double& at(int a, int j) { return values[static_cast<std::size_t>(a) * n_offsets + j]; }
    double at(int a, int j) const { return values[static_cast<std::size_t>(a) * n_offsets + j]; }
    CellMask& mask_at(int a, int j) { return mask[static_cast<std::size_t>(a) * n_offsets + j]; }
    CellMask mask_at(int a, int j) const {
        return mask[static_cast<std::size_t>(a) * n_offsets + j];
    }
    Line line_at(int a, int j) const { return Line{offset(j), angle(a)}; }

    bool has_excluded() const;

    /// CSV with header "phi,s,value,mask", one row per cell.
    void save_csv(const std::string& path) const;
    static Sinogram load_csv(const std::string& path);
};

/// Attenuated broken ray transform of the field over one trajectory: the sum
/// of per-segment integrals with cumulative-length attenuation offsets.
double brt_forward(const ScalarField2D& field, const BrokenRay& ray, AttenuationSpec att = {},
                   const QuadratureSpec& quad = {});

/// Planar Radon transform: integral of the field along the line, truncated
/// to the support box. Lines missing the box integrate to zero.
double radon_forward(const ScalarField2D& field, const Line& line,
                     const QuadratureSpec& quad = {});

using BrtOracle = std::function<double(const BrokenRay&)>;

/// Fill the sinogram by folding each (angle, offset) line into a broken ray
/// and querying the oracle. Cells whose line passes the apex, crosses the
/// filler cone, or misses the domain are masked Excluded. Raises
/// DegenerateGeometry when nothing is measured. Parallel over cells with a
/// thread-count-independent result.
Sinogram assemble_sinogram(const DihedralUnfolding& u, const BrtOracle& oracle, int n_angles,
                           int n_offsets, double s_max, const TraceOptions& opts = {});

/// Replace Excluded cells: linear interpolation between the nearest measured
/// neighbors along the offset axis, zero where a side has no data (lines
/// beyond the domain). Filled cells are flagged Interpolated.
void fill_excluded_cells(Sinogram& sino);

/// Additive gaussian perturbation of the measured cells, in a fixed cell
/// order so the result depends only on the seed.
void add_gaussian_noise(Sinogram& sino, double sigma, std::uint64_t seed);

/// Integral over one period of the closed torus geodesic t -> x0 + 2 t k
/// (unit-speed line integral, so the value carries the arclength 2|k|).
/// Uniform periodic quadrature with `nodes` samples.
double torus_geodesic_integral(const TorusField& field, const std::array<int, 3>& k,
                               const std::array<double, 3>& x0, int nodes = 512);

/// Integral of the field along the unit-speed great circle with the given
/// normal; uniform quadrature, exact for band-limited fields when
/// nodes > 2 * band.
double great_circle_integral(const SphereField& field, Vec3 omega, int nodes = 512);

/// Periodic broken ray transform: unit-weight integral over a closed planar
/// polyline orbit.
double periodic_brt(const ScalarField2D& field, const BrokenRay& orbit,
                    const QuadratureSpec& quad = {});

/// Cube variant: integral of an n-dimensional field over a folded torus
/// geodesic.
double periodic_brt(const std::function<double(const std::array<double, 3>&)>& field,
                    const CubeOrbit& orbit, const QuadratureSpec& quad = {});

/// Octant variant: integral of the octant field over the fold of the full
/// great circle.
double periodic_brt(const SphereField& octant_field, const GreatCircle& circle, int nodes = 512);

}  // namespace brt
