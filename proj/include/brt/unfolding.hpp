#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "brt/fields.hpp"
#include "brt/geom.hpp"
#include "brt/planar.hpp"

namespace brt {

/// Mirror-copy tiling of a cone domain around its apex. For opening angle
/// pi/m (integer m) the K = 2m copies tile the full plane; otherwise the
/// smallest K with K*alpha >= pi is used and the leftover angular range is
/// blocked by a compact filler cone of radius 1.05 * max h. Sector i is the
/// image of the source domain under the linear section map iota_i (a
/// rotation for even i, a reflection for odd i); fold_point applies the
/// projection that undoes the copying.
struct DihedralUnfolding {
    ConeDomain source;
    int copy_count{2};       // K
    bool integer_case{true}; // K*alpha == 2*pi, alpha == pi/m
    int m{1};                // valid in the integer case
    double filler_start{0.0};
    double filler_width{0.0};
    double filler_radius{0.0};

    static DihedralUnfolding create(ConeDomain source);

    double alpha() const { return source.alpha; }
    bool has_filler() const { return filler_width > 1e-12; }

    /// Section map iota_i applied to a point of the source domain.
    Vec2 section_point(int sector, Vec2 x) const;
    /// Differential of iota_i (the same linear map).
    Vec2 section_dir(int sector, Vec2 d) const;

    /// Fold a plane point back into the source domain: (sector index, point).
    /// Raises OutsideUnfolding at the apex and on the filler range.
    std::pair<int, Vec2> fold_point(Vec2 x) const;
    /// Differential of the projection within the given sector.
    Vec2 fold_dir(int sector, Vec2 d) const;

    bool point_in_filler(Vec2 x) const;
    /// Exact support-function test of the line against the filler cone.
    bool line_hits_filler(const Line& line) const;

    std::string to_json() const;
};

/// A broken ray straightened out in the unfolded plane.
struct UnfoldedRay {
    std::vector<Vec2> vertices;
    Line line;               // oriented so the traversal starts at vertices.front()
    double length{0.0};
    /// Max perpendicular deviation of the vertices from the chord, relative
    /// to the length.
    double collinearity_residual{0.0};
    int initial_sector{0};
};

/// Straighten a broken ray. initial_sector places the first vertex; pass
/// std::nullopt for the canonical choice (sector 0 when the ray sweeps
/// counterclockwise, otherwise the sector that keeps every copy in range).
UnfoldedRay unfold_broken_ray(const DihedralUnfolding& u, const BrokenRay& ray,
                              std::optional<int> initial_sector = std::nullopt);

struct FoldedLine {
    BrokenRay ray;
    int entry_sector{0};
};

/// Fold a straight line into a broken ray of the source domain. Raises
/// ApexLine, FillerConeHit, EmptyIntersection; TipHit propagates from the
/// tracer.
FoldedLine fold_line(const DihedralUnfolding& u, const Line& line,
                     const TraceOptions& opts = {});

/// Pullback f_tilde = f o p extended by zero outside the unfolded region.
ScalarField2D fold_field(const DihedralUnfolding& u, const ScalarField2D& f);

// --- Cube <-> torus folding -------------------------------------------------

/// Per-axis fold of the period-2 torus onto [0,1]: 1 - |1 - (u mod 2)|.
double cube_fold_scalar(double u);
std::array<double, 3> cube_fold_point(int n, const std::array<double, 3>& x);

/// Closed billiard orbit in the unit cube obtained by folding the torus
/// geodesic t -> x0 + 2 t k, t in [0,1].
struct CubeOrbit {
    int n{2};
    std::vector<std::array<double, 3>> vertices;  // first == last
    std::vector<int> reflection_axes;             // axis of each interior vertex
    double total_length{0.0};

    /// Planar view (n == 2 only).
    BrokenRay to_broken_ray() const;
};

CubeOrbit torus_geodesic_to_cube_orbit(int n, const std::array<int, 3>& k,
                                       const std::array<double, 3>& x0);

// --- Octant <-> sphere folding ----------------------------------------------

/// Fold of the sphere onto the closed positive octant.
Vec3 octant_fold_point(Vec3 x);

/// Great circle of S^2 with unit normal omega and a deterministic in-plane
/// frame; point_at(t) walks the circle at unit speed.
struct GreatCircle {
    Vec3 normal;
    Vec3 e1, e2;

    explicit GreatCircle(Vec3 omega);
    Vec3 point_at(double t) const { return e1 * std::cos(t) + e2 * std::sin(t); }
};

/// Even extension f o p of an octant field to the whole sphere.
SphereField octant_unfold_field(const SphereField& octant_field);

}  // namespace brt
