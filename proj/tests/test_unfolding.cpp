#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "brt/errors.hpp"
#include "brt/unfolding.hpp"

using namespace brt;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InternalError;
}

DihedralUnfolding unit_unfolding(double alpha) {
    return DihedralUnfolding::create(ConeDomain(alpha, BoundaryRadius::constant(1.0)));
}

/// Random ray traced into the cone, or nullopt when the sample degenerates.
std::optional<BrokenRay> random_ray(const ConeDomain& dom, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double theta = dom.alpha * (0.03 + 0.94 * unit(rng));
    const Vec2 start = polar(dom.h(theta), theta);
    const Vec2 dir = rotate((-start).normalized(), (unit(rng) - 0.5) * 2.4);
    try {
        TraceOptions opts;
        opts.max_reflections = 64;
        return trace_broken_ray(dom, start, dir, opts);
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Event-driven cube billiard, independent of the folding construction.
std::vector<std::array<double, 3>> billiard_oracle(int n, std::array<double, 3> pos,
                                                   std::array<double, 3> vel, double total_time) {
    std::vector<std::array<double, 3>> vertices{pos};
    double remaining = total_time;
    while (remaining > 1e-12) {
        double t_hit = remaining;
        int axis = -1;
        for (int i = 0; i < n; ++i) {
            if (vel[i] == 0.0) continue;
            const double target = vel[i] > 0.0 ? 1.0 : 0.0;
            const double t = (target - pos[i]) / vel[i];
            if (t > 1e-12 && t < t_hit - 1e-12) {
                t_hit = t;
                axis = i;
            }
        }
        for (int i = 0; i < n; ++i) pos[i] += vel[i] * t_hit;
        vertices.push_back(pos);
        remaining -= t_hit;
        if (axis >= 0) vel[axis] = -vel[axis];
    }
    return vertices;
}

}  // namespace

TEST_CASE("copy counts: 2m for integer cones, ceil(pi/alpha) otherwise") {
    CHECK(unit_unfolding(kPi).copy_count == 2);
    CHECK(unit_unfolding(kPi).integer_case);
    CHECK(unit_unfolding(kPi / 2.0).copy_count == 4);
    CHECK(unit_unfolding(kPi / 3.0).copy_count == 6);
    const DihedralUnfolding general = unit_unfolding(2.0 * kPi / 3.0);
    CHECK_FALSE(general.integer_case);
    CHECK(general.copy_count == 2);
    CHECK(general.filler_width == doctest::Approx(2.0 * kPi / 3.0));
    CHECK(general.filler_radius == doctest::Approx(1.05));
}

TEST_CASE("fold_point: the fundamental sector maps to itself") {
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    const Vec2 x = polar(0.7, 0.4);
    const auto [sector, folded] = u.fold_point(x);
    CHECK(sector == 0);
    CHECK((folded - x).norm() < 1e-15);
}

TEST_CASE("fold_point follows the mod-reflect formula") {
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    const double alpha = kPi / 3.0;
    {
        // 7 pi / 6 mod 2 alpha = pi / 2, which reflects to 2 alpha - pi/2 = pi/6.
        const auto [sector, folded] = u.fold_point(polar(0.8, 7.0 * kPi / 6.0));
        CHECK(folded.norm() == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(folded.angle() == doctest::Approx(kPi / 6.0).epsilon(1e-12));
        CHECK(sector == 3);
    }
    {
        // Just past the first edge: theta in (alpha, 2 alpha) folds to 2 alpha - theta.
        const auto [sector, folded] = u.fold_point(polar(0.5, alpha + 0.1));
        CHECK(sector == 1);
        CHECK(folded.angle() == doctest::Approx(alpha - 0.1).epsilon(1e-12));
    }
}

TEST_CASE("fold_point rejects the apex and the filler range") {
    const DihedralUnfolding u = unit_unfolding(2.0 * kPi / 3.0);
    CHECK(code_of([&] { u.fold_point({1e-12, 0.0}); }) == ErrorCode::OutsideUnfolding);
    CHECK(code_of([&] { u.fold_point(polar(0.5, 1.6 * kPi)); }) == ErrorCode::OutsideUnfolding);
}

TEST_CASE("fold/section round trips over random points") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double alpha : {kPi, kPi / 2.0, kPi / 5.0, 2.0 * kPi / 3.0, 1.1}) {
        const DihedralUnfolding u = unit_unfolding(alpha);
        const double span = u.integer_case ? kTwoPi : u.copy_count * alpha;
        for (int trial = 0; trial < 200; ++trial) {
            const double theta = span * unit(rng);
            const Vec2 x = polar(0.05 + 0.9 * unit(rng), theta);
            const auto [sector, folded] = u.fold_point(x);
            // Section reproduces the point: iota_sector undoes the fold here.
            CHECK((u.section_point(sector, folded) - x).norm() < 1e-12);
            // Idempotence through the section.
            const auto [sector2, folded2] = u.fold_point(u.section_point(sector, folded));
            CHECK(sector2 == sector);
            CHECK((folded2 - folded).norm() < 1e-12);
            // The folded angle lies in [0, alpha].
            const double fa = folded.angle();
            CHECK((fa <= alpha + 1e-9 || fa >= kTwoPi - 1e-9));
        }
    }
}

TEST_CASE("unfolding a zero-reflection ray is the identity") {
    const DihedralUnfolding u = unit_unfolding(kPi);
    const BrokenRay ray = trace_broken_ray(u.source, {0.0, 1.0}, {-0.8, -0.6});
    const UnfoldedRay unfolded = unfold_broken_ray(u, ray);
    REQUIRE(unfolded.vertices.size() == ray.vertices.size());
    for (std::size_t i = 0; i < ray.vertices.size(); ++i)
        CHECK((unfolded.vertices[i] - ray.vertices[i]).norm() < 1e-12);
}

TEST_CASE("unfolding the half-disk example mirrors the exit point") {
    const DihedralUnfolding u = unit_unfolding(kPi);
    const BrokenRay ray =
        trace_broken_ray(u.source, {0.0, 1.0}, {0.5, -std::sqrt(3.0) / 2.0});
    const UnfoldedRay unfolded = unfold_broken_ray(u, ray, 0);
    REQUIRE(unfolded.vertices.size() == 3);
    CHECK((unfolded.vertices[0] - Vec2{0.0, 1.0}).norm() < 1e-12);
    CHECK(unfolded.vertices[2].x == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-10));
    CHECK(unfolded.vertices[2].y == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(unfolded.collinearity_residual < 1e-12);
    CHECK(unfolded.length == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("unfolded traced rays are collinear") {
    std::mt19937_64 rng(31);
    for (double alpha : {kPi / 3.0, kPi / 7.0, 2.0 * kPi / 3.0, 0.9}) {
        const DihedralUnfolding u = unit_unfolding(alpha);
        int checked = 0;
        for (int trial = 0; trial < 300 && checked < 60; ++trial) {
            const auto ray = random_ray(u.source, rng);
            if (!ray) continue;
            UnfoldedRay unfolded;
            try {
                unfolded = unfold_broken_ray(u, *ray);
            } catch (const Error&) {
                continue;  // sweeps wider than the general-angle fan
            }
            CHECK(unfolded.collinearity_residual < 1e-9);
            CHECK(unfolded.length == doctest::Approx(ray->total_length).epsilon(1e-12));
            // Folding every unfolded vertex recovers the ray vertex.
            for (std::size_t j = 0; j < unfolded.vertices.size(); ++j) {
                const auto [sector, folded] = u.fold_point(unfolded.vertices[j]);
                CHECK((folded - ray->vertices[j]).norm() < 1e-9);
            }
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("fold_line: a sector-0 chord folds to a zero-reflection ray") {
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    // Chord connecting two points of the outer arc strictly inside sector 0.
    const Vec2 a = polar(1.0, 0.08);
    const Vec2 b = polar(1.0, kPi / 3.0 - 0.08);
    const Line line = Line::through(a, (b - a).normalized());
    const FoldedLine folded = fold_line(u, line);
    CHECK(folded.ray.reflection_count() == 0);
    CHECK((folded.ray.vertices.front() - a).norm() < 1e-9);
    CHECK((folded.ray.vertices.back() - b).norm() < 1e-9);
}

TEST_CASE("fold_line inverts the half-disk unfolding example") {
    const DihedralUnfolding u = unit_unfolding(kPi);
    const Vec2 a{0.0, 1.0};
    const Vec2 b{std::sqrt(3.0) / 2.0, -0.5};
    const Line line = Line::through(a, (b - a).normalized());
    const FoldedLine folded = fold_line(u, line);
    REQUIRE(folded.ray.vertices.size() == 3);
    CHECK((folded.ray.vertices[0] - a).norm() < 1e-9);
    CHECK(folded.ray.vertices[1].x == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(folded.ray.vertices[2].x == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
    CHECK(folded.ray.vertices[2].y == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("fold_line rejects apex lines") {
    const DihedralUnfolding u = unit_unfolding(kPi / 2.0);
    CHECK(code_of([&] { fold_line(u, Line{0.0, 0.3}); }) == ErrorCode::ApexLine);
}

TEST_CASE("fold_line rejects filler-cone crossers and misses") {
    const DihedralUnfolding u = unit_unfolding(2.0 * kPi / 3.0);
    // Line passing straight through the filler wedge midline.
    const double mid = u.filler_start + 0.5 * u.filler_width;
    const Line hit = Line::through(polar(0.5, mid), polar(1.0, mid + kPi / 2.0));
    CHECK(code_of([&] { fold_line(u, hit); }) == ErrorCode::FillerConeHit);
    // Line entirely outside every copy.
    CHECK(code_of([&] { fold_line(u, Line{1.5, 0.4}); }) == ErrorCode::EmptyIntersection);
}

TEST_CASE("round trip: fold_line after unfold reproduces the traced ray") {
    std::mt19937_64 rng(77);
    for (double alpha : {kPi, kPi / 2.0, kPi / 3.0, kPi / 6.0, 2.0 * kPi / 3.0}) {
        const DihedralUnfolding u = unit_unfolding(alpha);
        int checked = 0;
        for (int trial = 0; trial < 400 && checked < 50; ++trial) {
            const auto ray = random_ray(u.source, rng);
            if (!ray) continue;
            FoldedLine refolded;
            try {
                const UnfoldedRay unfolded = unfold_broken_ray(u, *ray);
                refolded = fold_line(u, unfolded.line);
            } catch (const Error&) {
                continue;  // lines grazing the filler or an edge endpoint
            }
            REQUIRE(refolded.ray.vertices.size() == ray->vertices.size());
            for (std::size_t i = 0; i < ray->vertices.size(); ++i)
                CHECK((refolded.ray.vertices[i] - ray->vertices[i]).norm() < 1e-9);
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("round trip: unfolding a folded chord recovers the chord") {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 40; ++trial) {
        const Line line{0.05 + 0.9 * unit(rng), kTwoPi * unit(rng)};
        FoldedLine folded;
        try {
            folded = fold_line(u, line);
        } catch (const Error&) {
            continue;
        }
        const UnfoldedRay unfolded = unfold_broken_ray(u, folded.ray, folded.entry_sector);
        // Same chord: every unfolded vertex satisfies the line equation.
        const Vec2 n = line.normal();
        for (const Vec2& w : unfolded.vertices)
            CHECK(std::abs(w.dot(n) - line.offset) < 1e-9);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("all 2m preimages of a broken ray unfold straight with the same length") {
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    std::mt19937_64 rng(17);
    const auto ray = random_ray(u.source, rng);
    REQUIRE(ray.has_value());
    for (int s = 0; s < u.copy_count; ++s) {
        const UnfoldedRay unfolded = unfold_broken_ray(u, *ray, s);
        CHECK(unfolded.collinearity_residual < 1e-9);
        CHECK(unfolded.length == doctest::Approx(ray->total_length).epsilon(1e-12));
    }
}

TEST_CASE("fold_field pulls back the source field sector by sector") {
    const DihedralUnfolding u = unit_unfolding(kPi / 3.0);
    const ScalarField2D f = ScalarField2D::analytic(
        [](Vec2 p) { return 1.0 + p.x + 2.0 * p.y * p.y; },
        BoundingBox::centered({0.0, 0.0}, 1.0));
    const ScalarField2D folded = fold_field(u, f);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = u.alpha() * unit(rng);
        const Vec2 x = polar(0.9 * unit(rng) + 0.02, theta);
        // Sector-0 restriction equals f.
        CHECK(folded(x) == doctest::Approx(f(x)).epsilon(1e-12));
        // Pullback through every section map matches the source evaluation.
        for (int s = 0; s < u.copy_count; ++s)
            CHECK(folded(u.section_point(s, x)) == doctest::Approx(f(x)).epsilon(1e-12));
    }
}

TEST_CASE("fold_field of a constant is constant on all copies and zero on the filler") {
    const DihedralUnfolding u = unit_unfolding(2.0 * kPi / 3.0);
    const ScalarField2D one = ScalarField2D::analytic([](Vec2) { return 1.0; },
                                                      BoundingBox::centered({0.0, 0.0}, 1.0));
    const ScalarField2D folded = fold_field(u, one);
    CHECK(folded(polar(0.5, 0.3)) == 1.0);
    CHECK(folded(polar(0.5, 1.2)) == 1.0);      // second copy
    CHECK(folded(polar(0.5, 1.8 * kPi)) == 0.0);  // filler range is zero
    CHECK(folded(polar(1.2, 0.3)) == 0.0);      // beyond the boundary radius
}

TEST_CASE("cube fold formula") {
    CHECK(cube_fold_scalar(0.3) == doctest::Approx(0.3));
    CHECK(cube_fold_scalar(1.25) == doctest::Approx(0.75));
    CHECK(cube_fold_scalar(1.0) == doctest::Approx(1.0));
    CHECK(cube_fold_scalar(2.0) == doctest::Approx(0.0));
    // 2-periodic per axis.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = u(rng);
        CHECK(cube_fold_scalar(x) == doctest::Approx(cube_fold_scalar(x + 2.0)).epsilon(1e-12));
        CHECK(cube_fold_scalar(x) >= 0.0);
        CHECK(cube_fold_scalar(x) <= 1.0);
    }
    const auto p = cube_fold_point(2, {0.4, 0.9, 0.0});
    CHECK(p[0] == doctest::Approx(0.4));
    CHECK(p[1] == doctest::Approx(0.9));
}

TEST_CASE("axis-aligned torus geodesic folds to the 2-bounce orbit") {
    const CubeOrbit orbit = torus_geodesic_to_cube_orbit(2, {1, 0, 0}, {0.0, 0.5, 0.0});
    CHECK(orbit.total_length == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(orbit.vertices.size() == 3);
    CHECK(orbit.vertices[0][0] == doctest::Approx(0.0));
    CHECK(orbit.vertices[1][0] == doctest::Approx(1.0));
    CHECK(orbit.vertices[1][1] == doctest::Approx(0.5));
}

TEST_CASE("diagonal torus geodesic matches the event-driven billiard oracle") {
    const std::array<double, 3> x0{0.2, 0.0, 0.0};
    const CubeOrbit orbit = torus_geodesic_to_cube_orbit(2, {1, 1, 0}, x0);
    CHECK(orbit.total_length == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(static_cast<int>(orbit.vertices.size()) == 5);  // 3 interior + the on-face seam

    const auto oracle = billiard_oracle(2, cube_fold_point(2, x0), {2.0, 2.0, 0.0}, 1.0);
    REQUIRE(oracle.size() == orbit.vertices.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        for (int a = 0; a < 2; ++a)
            CHECK(orbit.vertices[i][a] == doctest::Approx(oracle[i][a]).epsilon(1e-10));
}

TEST_CASE("n=3 planar orbit stays in its plane and matches the oracle") {
    const std::array<double, 3> x0{0.15, 0.4, 0.77};
    const CubeOrbit orbit = torus_geodesic_to_cube_orbit(3, {1, 1, 0}, x0);
    for (const auto& v : orbit.vertices) CHECK(v[2] == doctest::Approx(0.77).epsilon(1e-12));
    const auto oracle = billiard_oracle(3, cube_fold_point(3, x0), {2.0, 2.0, 0.0}, 1.0);
    REQUIRE(oracle.size() == orbit.vertices.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        for (int a = 0; a < 3; ++a)
            CHECK(orbit.vertices[i][a] == doctest::Approx(oracle[i][a]).epsilon(1e-10));
}

TEST_CASE("orbits running inside a face are rejected") {
    CHECK(code_of([] { torus_geodesic_to_cube_orbit(2, {1, 0, 0}, {0.3, 0.0, 0.0}); }) ==
          ErrorCode::DegenerateOrbit);
    CHECK(code_of([] { torus_geodesic_to_cube_orbit(2, {0, 0, 0}, {0.3, 0.4, 0.0}); }) ==
          ErrorCode::InvalidOrbit);
}

TEST_CASE("cube orbit reflection law at every face hit") {
    const CubeOrbit orbit = torus_geodesic_to_cube_orbit(2, {2, 3, 0}, {0.33, 0.71, 0.0});
    const BrokenRay ray = orbit.to_broken_ray();
    for (std::size_t j = 1; j + 1 < ray.vertices.size(); ++j) {
        const int axis = orbit.reflection_axes[j - 1];
        const Vec2 din = (ray.vertices[j] - ray.vertices[j - 1]).normalized();
        const Vec2 dout = (ray.vertices[j + 1] - ray.vertices[j]).normalized();
        const Vec2 n = axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        CHECK((dout - (din - 2.0 * din.dot(n) * n)).norm() < 1e-10);
    }
}

TEST_CASE("octant fold") {
    const Vec3 p = octant_fold_point({-0.3, 0.5, -0.81});
    CHECK(p.x == doctest::Approx(0.3));
    CHECK(p.y == doctest::Approx(0.5));
    CHECK(p.z == doctest::Approx(0.81));
    // Octant points are fixed; antipodes map to the same image; norms kept.
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 x = Vec3{g(rng), g(rng), g(rng)}.normalized();
        const Vec3 fx = octant_fold_point(x);
        CHECK(std::abs(fx.norm() - 1.0) < 1e-14);
        CHECK((octant_fold_point(-x) - fx).norm() < 1e-15);
        const Vec3 oct{std::abs(x.x), std::abs(x.y), std::abs(x.z)};
        CHECK((octant_fold_point(oct) - oct).norm() < 1e-15);
    }
}

TEST_CASE("folded great circle meets the octant boundary with equal angles") {
    const GreatCircle circle(Vec3{0.3, -0.5, 0.9}.normalized());
    // Find a crossing of the x = 0 plane and compare secant angles on both
    // sides of the fold.
    double t_cross = -1.0;
    for (int i = 0; i < 4096; ++i) {
        const double t0 = kTwoPi * i / 4096, t1 = kTwoPi * (i + 1) / 4096;
        if (circle.point_at(t0).x * circle.point_at(t1).x < 0.0) {
            double a = t0, b = t1;
            for (int iter = 0; iter < 80; ++iter) {
                const double mid = 0.5 * (a + b);
                (circle.point_at(a).x * circle.point_at(mid).x <= 0.0 ? b : a) = mid;
            }
            t_cross = 0.5 * (a + b);
            break;
        }
    }
    REQUIRE(t_cross >= 0.0);
    const double eps = 1e-5;
    const Vec3 before = octant_fold_point(circle.point_at(t_cross - eps));
    const Vec3 at = octant_fold_point(circle.point_at(t_cross));
    const Vec3 after = octant_fold_point(circle.point_at(t_cross + eps));
    const Vec3 din = (at - before).normalized();
    const Vec3 dout = (after - at).normalized();
    const Vec3 n{1.0, 0.0, 0.0};  // boundary plane normal
    CHECK(std::abs(din.dot(n) + dout.dot(n)) < 1e-4);
    const Vec3 din_t = din - n * din.dot(n);
    const Vec3 dout_t = dout - n * dout.dot(n);
    CHECK((din_t - dout_t).norm() < 1e-4);
}

TEST_CASE("unfolding descriptions serialize to JSON") {
    const DihedralUnfolding integer = unit_unfolding(kPi / 3.0);
    CHECK(integer.to_json().find("\"m\":3") != std::string::npos);
    const DihedralUnfolding general = unit_unfolding(2.0 * kPi / 3.0);
    CHECK(general.to_json().find("filler") != std::string::npos);
}
