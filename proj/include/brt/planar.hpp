#pragma once

#include <functional>
#include <string>
#include <vector>

#include "brt/geom.hpp"

namespace brt {

/// Outer boundary radius h(theta) of a cone domain, picked from a small
/// registry so the tracer knows when exact circle intersection applies.
struct BoundaryRadius {
    enum class Kind { Constant, PiecewiseConstant, SmoothPerturbation };

    Kind kind{Kind::Constant};
    double base{1.0};
    // piecewise: breakpoints[i] ends the i-th piece with radius levels[i]
    std::vector<double> breakpoints;
    std::vector<double> levels;
    // smooth perturbation: base * (1 + eps * cos(waves * theta))
    double eps{0.0};
    double waves{0.0};

    static BoundaryRadius constant(double value);
    static BoundaryRadius piecewise(std::vector<double> breakpoints, std::vector<double> levels);
    static BoundaryRadius smooth(double base, double eps, double waves);

    double operator()(double theta) const;
    double min_radius() const;
    double max_radius() const;
    std::string registry_key() const;
};

/// Planar sector {(r, theta) : 0 < theta < alpha, 0 < r < h(theta)}.
/// The two edge rays reflect; the outer graph of h is the tomography set E;
/// the apex and the edge endpoints form the corner set C.
struct ConeDomain {
    double alpha{kPi};
    BoundaryRadius h{};

    ConeDomain() = default;
    ConeDomain(double opening_angle, BoundaryRadius radius);

    double min_h() const { return h.min_radius(); }
    double max_h() const { return h.max_radius(); }
    /// Segments closer to the corner set than this raise TipHit.
    double tip_epsilon() const { return 1e-9 * min_h(); }

    bool contains(Vec2 p, double slack = 0.0) const;
    /// Signed radial residual |p| - h(theta(p)); negative inside.
    double radial_residual(Vec2 p) const;
    /// Distance from p to the tomography set along the radius (for start
    /// validation).
    bool on_tomography_set(Vec2 p, double tol) const;
};

/// Rectangular billiard tube (0,W) x (0,L): the two vertical sides reflect,
/// bottom and top are the tomography set.
struct RectTube {
    double width{1.0};
    double length{1.0};

    RectTube() = default;
    RectTube(double w, double l);
};

/// Piecewise-straight billiard trajectory. Interior vertices are reflection
/// points; first/last vertices lie on the tomography set (or coincide for
/// closed orbits).
struct BrokenRay {
    std::vector<Vec2> vertices;
    double total_length{0.0};
    bool closed{false};
    std::string domain_tag;

    int reflection_count() const {
        const int interior = static_cast<int>(vertices.size()) - 2;
        return interior > 0 ? interior : 0;
    }
    int segment_count() const {
        return vertices.size() >= 2 ? static_cast<int>(vertices.size()) - 1 : 0;
    }

    /// Largest violation of d+ = d- - 2(d-.n)n over the interior vertices,
    /// given the local unit normal at each vertex.
    double reflection_residual(const std::function<Vec2(Vec2)>& normal_at) const;

    std::string to_json() const;
    static BrokenRay from_json(const std::string& text);
};

double polyline_length(const std::vector<Vec2>& vertices);

/// Specular reflection d - 2 (d.n) n. Raises TangentialHit when |d.n| is
/// below tolerance (grazing incidence has no stable reflected direction).
Vec2 reflect_direction(Vec2 d, Vec2 n, double tangential_tol = 1e-12);

struct TraceOptions {
    int max_reflections{64};
    /// Tolerance for "start lies on E" checks, relative to min h.
    double start_tol{1e-7};
    double tangential_tol{1e-10};
};

/// Trace a broken ray from a point on E into the cone until it crosses E
/// again. Raises TipHit near the corner set, TangentialHit on grazing edge
/// hits, MaxReflectionsExceeded.
BrokenRay trace_broken_ray(const ConeDomain& domain, Vec2 start, Vec2 dir,
                           const TraceOptions& opts = {});

/// Closed star-polygon orbit in the unit disk: q vertices at angles
/// phase + 2 pi j p / q. Requires q >= 2, 0 < p < q, gcd(p, q) == 1.
BrokenRay disk_star_orbit(int q, int p, double phase);

/// Trace inside a rectangular tube from a point on the bottom edge; the ray
/// reflects on x in {0, W} and terminates on the top or bottom edge.
BrokenRay rect_tube_trace(const RectTube& tube, Vec2 start, Vec2 dir,
                          const TraceOptions& opts = {});

}  // namespace brt
