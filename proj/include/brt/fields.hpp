#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "brt/geom.hpp"

namespace brt {

enum class FieldKind { Grid, Analytic };

/// Quadrature configuration for every line/segment integral in the library.
/// Composite Simpson; node count per segment is ceil(density * length),
/// rounded up to an even interval count, never fewer than 2 intervals.
struct QuadratureSpec {
    double nodes_per_unit_length{64.0};

    int interval_count(double length) const;
};

/// Exponential attenuation weight exp(h * (t + offset)) applied along a
/// segment parameterized by arclength t. h == 0 gives the unit weight; the
/// offset carries accumulated length from earlier segments of a broken ray.
struct AttenuationWeight {
    double h{0.0};
    double offset{0.0};

    static AttenuationWeight unit() { return {0.0, 0.0}; }
};

/// Real scalar field on a bounded planar region. Grid fields interpolate
/// bilinearly between samples; analytic fields wrap an evaluator. Evaluation
/// anywhere outside the support box is exactly zero. Immutable after
/// construction, so evaluation is safe from any number of threads.
class ScalarField2D {
  public:
    ScalarField2D() = default;

    static ScalarField2D grid(Vec2 origin, double spacing, int nx, int ny,
                              std::vector<double> values);
    static ScalarField2D analytic(std::function<double(Vec2)> eval, BoundingBox support);

    double operator()(Vec2 p) const;

    FieldKind kind() const { return kind_; }
    const BoundingBox& support() const { return support_; }

    // Grid accessors (FieldError on analytic fields).
    int nx() const;
    int ny() const;
    double spacing() const;
    Vec2 origin() const;
    const std::vector<double>& values() const;

    /// CSV with header line "nx,ny,ox,oy,spacing" followed by ny rows of nx
    /// comma-separated samples (row-major, y outer).
    void save_csv(const std::string& path) const;
    static ScalarField2D load_csv(const std::string& path);

    /// 16-bit binary PGM plus a JSON sidecar (path + ".json") holding the
    /// min/max used for scaling and the grid placement.
    void save_pgm(const std::string& path) const;
    static ScalarField2D load_pgm(const std::string& path);

  private:
    FieldKind kind_{FieldKind::Analytic};
    BoundingBox support_{};
    // grid state
    Vec2 origin_{};
    double spacing_{1.0};
    int nx_{0}, ny_{0};
    std::vector<double> values_;
    // analytic state
    std::function<double(Vec2)> eval_;

    double grid_value(Vec2 p) const;
};

/// Profile g : [0,1] -> R, optionally flagged as compactly supported inside
/// (margin, 1 - margin). The flag is verified by endpoint sampling.
class RadialProfile {
  public:
    RadialProfile() = default;
    RadialProfile(std::function<double(double)> g, bool compact_support, double margin = 0.05);

    double operator()(double t) const { return g_(t); }
    bool compact_support() const { return compact_; }

    /// Mean value over [0,1] by composite Simpson.
    double mean(int intervals = 4096) const;

  private:
    std::function<double(double)> g_ = [](double) { return 0.0; };
    bool compact_{false};
};

/// Real field on the flat torus [0,2]^n (opposite faces identified), n = 2
/// or 3. Evaluation must be 2-periodic per axis.
struct TorusField {
    int n{2};
    std::function<double(const std::array<double, 3>&)> eval;

    double operator()(const std::array<double, 3>& x) const { return eval(x); }
};

/// Real field on the unit sphere S^2.
struct SphereField {
    std::function<double(Vec3)> eval;

    double operator()(Vec3 x) const { return eval(x); }
};

/// Integral of field * exp(h (t + offset)) along the segment p0 -> p1 with t
/// the arclength from p0, by composite Simpson. Non-finite samples raise
/// QuadratureError.
double integrate_segment(const ScalarField2D& field, Vec2 p0, Vec2 p1,
                         AttenuationWeight weight = AttenuationWeight::unit(),
                         const QuadratureSpec& quad = {});

/// Simpson integral of a 1-D callable on [a, b] with a fixed even interval
/// count; the workhorse behind integrate_segment, exposed for the torus,
/// sphere, and nullspace code.
double simpson_1d(const std::function<double(double)>& f, double a, double b, int intervals);

}  // namespace brt
