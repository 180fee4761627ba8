#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace brt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// 2-D point/vector with the handful of operations the tracing and
/// transform code needs.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double xx, double yy) : x(xx), y(yy) {}

    constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

    constexpr double dot(Vec2 r) const { return x * r.x + y * r.y; }
    /// z-component of the 3-D cross product; positive when r is
    /// counterclockwise from *this.
    constexpr double cross(Vec2 r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }

    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    /// Rotate by +90 degrees.
    constexpr Vec2 perp() const { return {-y, x}; }
    /// Polar angle in [0, 2pi).
    double angle() const {
        double a = std::atan2(y, x);
        if (a < 0.0) a += kTwoPi;
        return a;
    }
};

inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

/// 3-D vector used by the sphere/octant code.
struct Vec3 {
    double x{0.0}, y{0.0}, z{0.0};

    constexpr Vec3() = default;
    constexpr Vec3(double xx, double yy, double zz) : x(xx), y(yy), z(zz) {}

    constexpr Vec3 operator+(Vec3 r) const { return {x + r.x, y + r.y, z + r.z}; }
    constexpr Vec3 operator-(Vec3 r) const { return {x - r.x, y - r.y, z - r.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {v.x * s, v.y * s, v.z * s}; }

    constexpr double dot(Vec3 r) const { return x * r.x + y * r.y + z * r.z; }
    constexpr Vec3 cross(Vec3 r) const {
        return {y * r.z - z * r.y, z * r.x - x * r.z, x * r.y - y * r.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

/// Axis-aligned bounding box; the support region of planar fields.
struct BoundingBox {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    Vec2 extent() const { return hi - lo; }

    static BoundingBox centered(Vec2 center, double half_width) {
        return {center - Vec2{half_width, half_width}, center + Vec2{half_width, half_width}};
    }
};

/// Oriented line in normal form: points x with x.dot(normal(phi)) == offset,
/// traversed in direction normal(phi).perp(). phi in [0, 2pi) encodes the
/// traversal orientation; (offset, phi) and (-offset, phi + pi) describe the
/// same point set walked in opposite directions.
struct Line {
    double offset{0.0};
    double phi{0.0};

    Vec2 normal() const { return {std::cos(phi), std::sin(phi)}; }
    Vec2 direction() const { return normal().perp(); }
    Vec2 point_at(double t) const { return normal() * offset + direction() * t; }

    /// Line through p with unit direction d, oriented along d.
    static Line through(Vec2 p, Vec2 d) {
        const Vec2 n{d.y, -d.x};
        Line l;
        l.offset = p.dot(n);
        l.phi = n.angle();
        return l;
    }
};

/// Clip a line against an axis-aligned box. Returns false when the line
/// misses the box, otherwise [t0, t1] bound the inside portion.
bool clip_line_to_box(const Line& line, const BoundingBox& box, double& t0, double& t1);

}  // namespace brt
