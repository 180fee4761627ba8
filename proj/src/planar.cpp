#include "brt/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "brt/errors.hpp"

namespace brt {

BoundaryRadius BoundaryRadius::constant(double value) {
    if (value <= 0.0) raise(ErrorCode::DegenerateGeometry, "boundary radius must be positive");
    BoundaryRadius h;
    h.kind = Kind::Constant;
    h.base = value;
    return h;
}

BoundaryRadius BoundaryRadius::piecewise(std::vector<double> breakpoints,
                                         std::vector<double> levels) {
    if (levels.empty() || breakpoints.size() != levels.size())
        raise(ErrorCode::DegenerateGeometry, "piecewise radius needs one breakpoint per level");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        raise(ErrorCode::DegenerateGeometry, "piecewise breakpoints must be sorted");
    for (double v : levels)
        if (v <= 0.0) raise(ErrorCode::DegenerateGeometry, "boundary radius must be positive");
    BoundaryRadius h;
    h.kind = Kind::PiecewiseConstant;
    h.breakpoints = std::move(breakpoints);
    h.levels = std::move(levels);
    h.base = h.levels.front();
    return h;
}

BoundaryRadius BoundaryRadius::smooth(double base, double eps, double waves) {
    if (base <= 0.0 || std::abs(eps) >= 1.0)
        raise(ErrorCode::DegenerateGeometry, "smooth radius needs base > 0 and |eps| < 1");
    BoundaryRadius h;
    h.kind = Kind::SmoothPerturbation;
    h.base = base;
    h.eps = eps;
    h.waves = waves;
    return h;
}

double BoundaryRadius::operator()(double theta) const {
    switch (kind) {
        case Kind::Constant:
            return base;
        case Kind::PiecewiseConstant: {
            auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), theta);
            const std::size_t idx =
                std::min<std::size_t>(it - breakpoints.begin(), levels.size() - 1);
            return levels[idx];
        }
        case Kind::SmoothPerturbation:
            return base * (1.0 + eps * std::cos(waves * theta));
    }
    return base;
}

double BoundaryRadius::min_radius() const {
    switch (kind) {
        case Kind::Constant: return base;
        case Kind::PiecewiseConstant: return *std::min_element(levels.begin(), levels.end());
        case Kind::SmoothPerturbation: return base * (1.0 - std::abs(eps));
    }
    return base;
}

double BoundaryRadius::max_radius() const {
    switch (kind) {
        case Kind::Constant: return base;
        case Kind::PiecewiseConstant: return *std::max_element(levels.begin(), levels.end());
        case Kind::SmoothPerturbation: return base * (1.0 + std::abs(eps));
    }
    return base;
}

std::string BoundaryRadius::registry_key() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::PiecewiseConstant: return "piecewise";
        case Kind::SmoothPerturbation: return "smooth";
    }
    return "constant";
}

ConeDomain::ConeDomain(double opening_angle, BoundaryRadius radius)
    : alpha(opening_angle), h(std::move(radius)) {
    if (!(alpha > 0.0) || alpha > kTwoPi + 1e-12)
        raise(ErrorCode::DegenerateGeometry, "cone opening angle must lie in (0, 2pi]");
    alpha = std::min(alpha, kTwoPi);
}

double ConeDomain::radial_residual(Vec2 p) const {
    return p.norm() - h(std::clamp(p.angle(), 0.0, alpha));
}

bool ConeDomain::contains(Vec2 p, double slack) const {
    const double r = p.norm();
    if (r <= 0.0) return false;
    const double theta = p.angle();
    if (theta > alpha + slack) return false;
    return r < h(std::clamp(theta, 0.0, alpha)) + slack;
}

bool ConeDomain::on_tomography_set(Vec2 p, double tol) const {
    double theta = p.angle();
    if (theta > alpha + tol) {
        if (theta < kTwoPi - tol) return false;  // outside the wedge entirely
        theta = 0.0;                             // wrapped just below the theta = 0 edge
    }
    return std::abs(p.norm() - h(std::clamp(theta, 0.0, alpha))) <= tol;
}

RectTube::RectTube(double w, double l) : width(w), length(l) {
    if (w <= 0.0 || l <= 0.0) raise(ErrorCode::DegenerateGeometry, "tube needs W, L > 0");
}

double polyline_length(const std::vector<Vec2>& vertices) {
    double total = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
        total += (vertices[i] - vertices[i - 1]).norm();
    return total;
}

double BrokenRay::reflection_residual(const std::function<Vec2(Vec2)>& normal_at) const {
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < vertices.size(); ++j) {
        const Vec2 din = (vertices[j] - vertices[j - 1]).normalized();
        const Vec2 dout = (vertices[j + 1] - vertices[j]).normalized();
        const Vec2 n = normal_at(vertices[j]);
        const Vec2 expected = din - 2.0 * din.dot(n) * n;
        worst = std::max(worst, (dout - expected).norm());
    }
    return worst;
}

std::string BrokenRay::to_json() const {
    nlohmann::json j;
    auto& verts = j["vertices"];
    verts = nlohmann::json::array();
    for (const Vec2& v : vertices) verts.push_back({v.x, v.y});
    j["length"] = total_length;
    j["reflections"] = reflection_count();
    return j.dump();
}

BrokenRay BrokenRay::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::IoError, "broken ray JSON parse failure");
    BrokenRay ray;
    for (const auto& v : j.at("vertices"))
        ray.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    ray.total_length = j.at("length").get<double>();
    return ray;
}

Vec2 reflect_direction(Vec2 d, Vec2 n, double tangential_tol) {
    const double dn = d.dot(n);
    if (std::abs(dn) < tangential_tol)
        raise(ErrorCode::TangentialHit, "incidence direction tangent to reflector");
    return d - 2.0 * dn * n;
}

namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

/// First positive time the ray p + t d crosses the boundary ray from the
/// origin in direction u (a cone edge), or infinity.
double edge_hit_time(Vec2 p, Vec2 d, Vec2 u, double t_min) {
    const double denom = u.cross(d);
    if (std::abs(denom) < 1e-300) return kNoHit;
    const double t = -u.cross(p) / denom;
    if (t <= t_min) return kNoHit;
    if (u.dot(p + d * t) < 0.0) return kNoHit;  // wrong half of the line
    return t;
}

/// First positive time |p + t d| crosses radius h (constant), assuming
/// |p| < h. Exact quadratic.
double circle_exit_time(Vec2 p, Vec2 d, double h) {
    const double b = p.dot(d);
    const double c = p.squared_norm() - h * h;
    const double disc = b * b - c;
    if (disc <= 0.0) return kNoHit;
    return -b + std::sqrt(disc);
}

struct BoundaryCrossing {
    double t{kNoHit};
};

/// First crossing of the outer boundary r = h(theta) along p + t d within
/// (t_min, t_max]. Constant h is solved exactly; otherwise a march with
/// bisection refinement to 1e-12 on the signed radial residual.
BoundaryCrossing outer_boundary_crossing(const ConeDomain& dom, Vec2 p, Vec2 d, double t_min,
                                         double t_max) {
    BoundaryCrossing out;
    if (dom.h.kind == BoundaryRadius::Kind::Constant) {
        const double t = circle_exit_time(p, d, dom.h.base);
        if (t > t_min && t <= t_max) out.t = t;
        return out;
    }
    const auto residual = [&](double t) { return dom.radial_residual(p + d * t); };
    const double step = dom.min_h() / 128.0;
    double lo = t_min;
    double f_lo = residual(lo);
    if (f_lo >= 0.0) {
        // Start already outside (grazing launch); report immediate crossing.
        out.t = t_min;
        return out;
    }
    const double cap = std::min(t_max, p.norm() + dom.max_h() + 1.0);
    while (lo < cap) {
        const double hi = std::min(lo + step, cap);
        const double f_hi = residual(hi);
        if (f_hi >= 0.0) {
            double a = lo, b = hi;
            for (int iter = 0; iter < 200 && b - a > 1e-12; ++iter) {
                const double mid = 0.5 * (a + b);
                (residual(mid) < 0.0 ? a : b) = mid;
            }
            out.t = 0.5 * (a + b);
            return out;
        }
        if (hi >= cap) break;
        lo = hi;
        f_lo = f_hi;
    }
    return out;
}

double segment_distance_to_origin(Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = d.squared_norm();
    if (len2 <= 0.0) return a.norm();
    const double t = std::clamp(-a.dot(d) / len2, 0.0, 1.0);
    return (a + d * t).norm();
}

}  // namespace

BrokenRay trace_broken_ray(const ConeDomain& dom, Vec2 start, Vec2 dir,
                           const TraceOptions& opts) {
    const double scale = dom.min_h();
    const double eps_tip = dom.tip_epsilon();
    dir = dir.normalized();

    if (!dom.on_tomography_set(start, opts.start_tol * scale))
        raise(ErrorCode::DegenerateGeometry, "trace start is not on the tomography set");
    if (!dom.contains(start + dir * (1e-7 * scale), 1e-10 * scale))
        raise(ErrorCode::DegenerateGeometry, "trace direction does not point into the domain");

    const Vec2 edge0_u{1.0, 0.0};
    const Vec2 edge0_n{0.0, 1.0};
    const Vec2 edge1_u = polar(1.0, dom.alpha);
    const Vec2 edge1_n{std::sin(dom.alpha), -std::cos(dom.alpha)};
    const Vec2 corner0 = edge0_u * dom.h(0.0);
    const Vec2 corner1 = edge1_u * dom.h(dom.alpha);

    BrokenRay ray;
    ray.domain_tag = "cone";
    ray.vertices.push_back(start);

    Vec2 p = start;
    Vec2 d = dir;
    const double t_min = 1e-12 * scale;

    for (int bounce = 0;; ++bounce) {
        const double t_edge0 = edge_hit_time(p, d, edge0_u, t_min);
        const double t_edge1 = edge_hit_time(p, d, edge1_u, t_min);
        const double t_edge = std::min(t_edge0, t_edge1);
        const auto crossing = outer_boundary_crossing(dom, p, d, t_min,
                                                      std::isfinite(t_edge) ? t_edge : kNoHit);

        const bool exits = crossing.t < t_edge;
        const double t_event = exits ? crossing.t : t_edge;
        if (!std::isfinite(t_event))
            raise(ErrorCode::InternalError, "ray found no boundary event in a bounded domain");

        const Vec2 hit = p + d * t_event;

        if (segment_distance_to_origin(p, hit) < eps_tip)
            raise(ErrorCode::TipHit, "segment passes the cone apex");
        if ((hit - corner0).norm() < eps_tip || (hit - corner1).norm() < eps_tip)
            raise(ErrorCode::TipHit, "segment hits an edge endpoint");

        ray.vertices.push_back(hit);
        ray.total_length += t_event;

        if (exits) break;

        if (bounce >= opts.max_reflections)
            raise(ErrorCode::MaxReflectionsExceeded, "reflection budget exhausted");
        const Vec2 n = (t_edge0 < t_edge1) ? edge0_n : edge1_n;
        d = reflect_direction(d, n, opts.tangential_tol);
        p = hit;
    }
    return ray;
}

BrokenRay disk_star_orbit(int q, int p, double phase) {
    if (q < 2 || p <= 0 || p >= q) raise(ErrorCode::InvalidOrbit, "need q >= 2 and 0 < p < q");
    if (std::gcd(p, q) != 1) raise(ErrorCode::InvalidOrbit, "p and q must be coprime");

    BrokenRay ray;
    ray.domain_tag = "disk";
    ray.closed = true;
    ray.vertices.reserve(q + 1);
    for (int j = 0; j <= q; ++j)
        ray.vertices.push_back(polar(1.0, phase + kTwoPi * p * j / q));
    ray.total_length = polyline_length(ray.vertices);
    return ray;
}

BrokenRay rect_tube_trace(const RectTube& tube, Vec2 start, Vec2 dir, const TraceOptions& opts) {
    dir = dir.normalized();
    if (std::abs(start.y) > 1e-9 * tube.length || start.x < 0.0 || start.x > tube.width)
        raise(ErrorCode::DegenerateGeometry, "tube trace must start on the bottom edge");
    if (dir.y < 0.0) raise(ErrorCode::DegenerateGeometry, "tube trace direction must point inward");
    if ((start.x <= 0.0 || start.x >= tube.width) && std::abs(dir.x) < opts.tangential_tol)
        raise(ErrorCode::TangentialHit, "ray runs along a reflecting wall");

    BrokenRay ray;
    ray.domain_tag = "tube";
    ray.vertices.push_back(start);

    Vec2 p = start;
    Vec2 d = dir;
    for (int bounce = 0;; ++bounce) {
        double t_side = kNoHit;
        if (d.x > opts.tangential_tol)
            t_side = (tube.width - p.x) / d.x;
        else if (d.x < -opts.tangential_tol)
            t_side = -p.x / d.x;

        double t_exit = kNoHit;
        if (d.y > opts.tangential_tol)
            t_exit = (tube.length - p.y) / d.y;
        else if (d.y < -opts.tangential_tol)
            t_exit = -p.y / d.y;

        if (t_exit <= t_side) {
            if (!std::isfinite(t_exit))
                raise(ErrorCode::MaxReflectionsExceeded,
                      "horizontal ray never reaches the tomography set");
            const Vec2 hit = p + d * t_exit;
            ray.vertices.push_back(hit);
            ray.total_length += t_exit;
            break;
        }
        if (bounce >= opts.max_reflections)
            raise(ErrorCode::MaxReflectionsExceeded, "reflection budget exhausted");
        const Vec2 hit = p + d * t_side;
        ray.vertices.push_back(hit);
        ray.total_length += t_side;
        d.x = -d.x;  // exact specular flip; keeps the axial component bit-identical
        p = hit;
    }
    return ray;
}

}  // namespace brt
