#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "brt/errors.hpp"
#include "brt/phantoms.hpp"
#include "brt/sphharm.hpp"
#include "brt/transforms.hpp"
#include "oracles.hpp"

using namespace brt;

namespace {

ScalarField2D gaussian_phantom(Vec2 center, double sigma, double box_half = 1.2) {
    return ScalarField2D::analytic(
        [center, sigma](Vec2 p) {
            return std::exp(-(p - center).squared_norm() / (2.0 * sigma * sigma));
        },
        BoundingBox::centered({0.0, 0.0}, box_half));
}

ScalarField2D bump_phantom(Vec2 center, double radius) {
    PhantomSpec spec;
    spec.key = "bump";
    spec.center = center;
    spec.radius = radius;
    return make_planar_phantom(spec);
}

}  // namespace

TEST_CASE("brt_forward of f == 1 over the one-reflection chord is its length") {
    const ConeDomain dom(kPi, BoundaryRadius::constant(1.0));
    const BrokenRay ray = trace_broken_ray(dom, {0.0, 1.0}, {0.5, -std::sqrt(3.0) / 2.0});
    const ScalarField2D one = ScalarField2D::analytic([](Vec2) { return 1.0; },
                                                      BoundingBox::centered({0.0, 0.0}, 2.0));
    CHECK(brt_forward(one, ray) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("brt_forward of the zero field vanishes for every ray") {
    const ConeDomain dom(kPi / 3.0, BoundaryRadius::constant(1.0));
    const ScalarField2D zero = ScalarField2D::analytic([](Vec2) { return 0.0; },
                                                       BoundingBox::centered({0.0, 0.0}, 2.0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = dom.alpha * (0.05 + 0.9 * unit(rng));
        const Vec2 start = polar(1.0, theta);
        try {
            const BrokenRay ray = trace_broken_ray(
                dom, start, rotate((-start).normalized(), (unit(rng) - 0.5) * 1.8));
            CHECK(brt_forward(zero, ray) == 0.0);
        } catch (const Error&) {
            continue;
        }
    }
}

TEST_CASE("attenuated straight ray reproduces the elementary closed form") {
    const ConeDomain dom(kPi, BoundaryRadius::constant(1.0));
    const BrokenRay ray = trace_broken_ray(dom, {0.0, 1.0}, {-0.8, -0.6});
    const double L = ray.total_length;
    const ScalarField2D one = ScalarField2D::analytic([](Vec2) { return 1.0; },
                                                      BoundingBox::centered({0.0, 0.0}, 2.0));
    for (double a : {0.5, 1.0, 3.0}) {
        const double v = brt_forward(one, ray, AttenuationSpec{-a}, QuadratureSpec{512.0});
        CHECK(v == doctest::Approx((1.0 - std::exp(-a * L)) / a).epsilon(1e-10));
    }
}

TEST_CASE("attenuation offsets chain across reflections") {
    // A broken ray with one reflection must match the single integral over
    // its unfolded straight chord (same arclength parameterization).
    const ConeDomain dom(kPi, BoundaryRadius::constant(1.0));
    const BrokenRay ray = trace_broken_ray(dom, {0.0, 1.0}, {0.5, -std::sqrt(3.0) / 2.0});
    const ScalarField2D one = ScalarField2D::analytic([](Vec2) { return 1.0; },
                                                      BoundingBox::centered({0.0, 0.0}, 2.0));
    const double h = -0.7;
    const double value = brt_forward(one, ray, AttenuationSpec{h}, QuadratureSpec{512.0});
    const double L = ray.total_length;
    CHECK(value == doctest::Approx((std::exp(h * L) - 1.0) / h).epsilon(1e-10));
}

TEST_CASE("radon of a disk indicator is the chord length") {
    const double rho = 0.6;
    const ScalarField2D disk = ScalarField2D::analytic(
        [rho](Vec2 p) { return p.norm() < rho ? 1.0 : 0.0; },
        BoundingBox::centered({0.0, 0.0}, rho));
    for (double d : {0.0, 0.2, 0.45}) {
        const double v = radon_forward(disk, Line{d, 0.7}, QuadratureSpec{4096.0});
        CHECK(v == doctest::Approx(2.0 * std::sqrt(rho * rho - d * d)).epsilon(2e-3));
    }
    CHECK(radon_forward(disk, Line{0.6, 0.7}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(radon_forward(disk, Line{0.9, 1.2}) == 0.0);
}

TEST_CASE("radon of a gaussian matches the dense-grid oracle") {
    const ScalarField2D f = gaussian_phantom({0.15, -0.1}, 0.3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Line line{(unit(rng) - 0.5) * 1.5, kTwoPi * unit(rng)};
        double t0 = 0.0, t1 = 0.0;
        if (!clip_line_to_box(line, f.support(), t0, t1)) continue;
        const double expected = oracles::dense_trapezoid(
            [&](double t) { return f(line.point_at(t)); }, t0, t1, 200001);
        const double got = radon_forward(f, line, QuadratureSpec{512.0});
        CHECK(got == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("unfolding identity: broken ray transform equals radon of the folded field") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double alpha : {kPi, 2.0 * kPi / 3.0}) {
        const DihedralUnfolding u =
            DihedralUnfolding::create(ConeDomain(alpha, BoundaryRadius::constant(1.0)));
        const ScalarField2D f = bump_phantom(polar(0.55, alpha * 0.45), 0.24);
        const ScalarField2D folded = fold_field(u, f);
        const QuadratureSpec quad{256.0};
        int checked = 0;
        for (int trial = 0; trial < 200 && checked < 40; ++trial) {
            const Line line{0.03 + 0.92 * unit(rng), kTwoPi * unit(rng)};
            FoldedLine fl;
            try {
                fl = fold_line(u, line);
            } catch (const Error&) {
                continue;
            }
            const double lhs = brt_forward(f, fl.ray, AttenuationSpec{}, quad);
            const double rhs = radon_forward(folded, line, quad);
            CHECK(std::abs(lhs - rhs) < 1e-7 * (1.0 + std::abs(rhs)));
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("all 2m preimage lines give the same radon value") {
    const DihedralUnfolding u =
        DihedralUnfolding::create(ConeDomain(kPi / 3.0, BoundaryRadius::constant(1.0)));
    const ScalarField2D f = bump_phantom(polar(0.5, 0.3), 0.22);
    const ScalarField2D folded = fold_field(u, f);
    const BrokenRay ray = trace_broken_ray(u.source, polar(1.0, 0.4),
                                           rotate(-polar(1.0, 0.4), 0.55));
    double first = 0.0;
    for (int s = 0; s < u.copy_count; ++s) {
        const UnfoldedRay unfolded = unfold_broken_ray(u, ray, s);
        const double v = radon_forward(folded, unfolded.line, QuadratureSpec{512.0});
        if (s == 0)
            first = v;
        else
            CHECK(v == doctest::Approx(first).epsilon(1e-9));
    }
}

TEST_CASE("assemble_sinogram of the zero oracle measures zeros") {
    const DihedralUnfolding u =
        DihedralUnfolding::create(ConeDomain(kPi, BoundaryRadius::constant(1.0)));
    const Sinogram sino = assemble_sinogram(u, [](const BrokenRay&) { return 0.0; }, 30, 31, 1.05);
    bool any_measured = false;
    for (int a = 0; a < sino.n_angles; ++a)
        for (int j = 0; j < sino.n_offsets; ++j)
            if (sino.mask_at(a, j) == CellMask::Measured) {
                any_measured = true;
                CHECK(sino.at(a, j) == 0.0);
            }
    CHECK(any_measured);
}

TEST_CASE("assembled sinogram equals the direct radon transform of the folded field") {
    const DihedralUnfolding u =
        DihedralUnfolding::create(ConeDomain(kPi, BoundaryRadius::constant(1.0)));
    const ScalarField2D f = bump_phantom({0.1, 0.45}, 0.26);
    const ScalarField2D folded = fold_field(u, f);
    const QuadratureSpec quad{320.0};
    const Sinogram sino = assemble_sinogram(
        u, [&](const BrokenRay& ray) { return brt_forward(f, ray, AttenuationSpec{}, quad); },
        48, 49, 1.05);
    double worst = 0.0;
    for (int a = 0; a < sino.n_angles; ++a)
        for (int j = 0; j < sino.n_offsets; ++j) {
            if (sino.mask_at(a, j) != CellMask::Measured) continue;
            const double direct = radon_forward(folded, sino.line_at(a, j), quad);
            worst = std::max(worst, std::abs(sino.at(a, j) - direct));
        }
    CHECK(worst < 1e-7);
}

TEST_CASE("filler-cone exclusion fraction matches the angular-measure formula") {
    const DihedralUnfolding u =
        DihedralUnfolding::create(ConeDomain(2.0 * kPi / 3.0, BoundaryRadius::constant(1.0)));
    const double s_max = 1.05;

    // Support function of the filler wedge, as in the library but written
    // against the raw geometry.
    const auto support = [&](double phi) {
        const Vec2 w = polar(1.0, phi);
        const double wa = w.angle();
        double best = 0.0;
        if (wa >= u.filler_start) best = u.filler_radius;
        best = std::max(best, u.filler_radius * std::max(0.0, w.dot(polar(1.0, u.filler_start))));
        best = std::max(best, u.filler_radius * std::max(0.0, w.x));
        return best;
    };
    // Angular-measure formula: fraction of (phi, s) with the line meeting the wedge.
    const int n_phi = 200000;
    double acc = 0.0;
    for (int i = 0; i < n_phi; ++i) {
        const double phi = kPi * (i + 0.5) / n_phi;
        acc += std::min(s_max, support(phi)) + std::min(s_max, support(phi + kPi));
    }
    const double analytic_fraction = acc / n_phi / (2.0 * s_max);

    // Monte Carlo over random lines, using the library's exact test.
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int samples = 200000;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        const Line line{(unit(rng) * 2.0 - 1.0) * s_max, kPi * unit(rng)};
        if (u.line_hits_filler(line)) ++hits;
    }
    const double mc_fraction = static_cast<double>(hits) / samples;
    CHECK(std::abs(mc_fraction - analytic_fraction) < 0.01);

    // And the assembled sinogram excludes exactly those cells (plus the
    // apex column and out-of-domain offsets).
    const Sinogram sino =
        assemble_sinogram(u, [](const BrokenRay&) { return 0.0; }, 90, 91, s_max);
    int excluded_filler = 0, grid_filler = 0;
    for (int a = 0; a < sino.n_angles; ++a)
        for (int j = 0; j < sino.n_offsets; ++j) {
            if (u.line_hits_filler(sino.line_at(a, j))) {
                ++grid_filler;
                if (sino.mask_at(a, j) == CellMask::Excluded) ++excluded_filler;
            }
        }
    CHECK(excluded_filler == grid_filler);
}

TEST_CASE("torus geodesic integral of a constant is 2 c |k|") {
    TorusField f;
    f.n = 2;
    f.eval = [](const std::array<double, 3>&) { return 1.7; };
    CHECK(torus_geodesic_integral(f, {3, 4, 0}, {0.3, 0.9, 0.0}) ==
          doctest::Approx(1.7 * 10.0).epsilon(1e-12));
}

TEST_CASE("torus geodesic integral of cosine modes follows the antiderivative") {
    TorusField f;
    f.n = 2;
    const std::array<int, 3> m{2, -1, 0};
    f.eval = [m](const std::array<double, 3>& x) {
        return std::cos(kPi * (m[0] * x[0] + m[1] * x[1]));
    };
    // k perpendicular to m: full-period average keeps the phase factor.
    const std::array<int, 3> k_perp{1, 2, 0};
    const std::array<double, 3> x0{0.37, 1.21, 0.0};
    const double expected =
        2.0 * std::sqrt(5.0) * std::cos(kPi * (m[0] * x0[0] + m[1] * x0[1]));
    CHECK(torus_geodesic_integral(f, k_perp, x0, 1024) ==
          doctest::Approx(expected).epsilon(1e-12));
    // k with m.k != 0 integrates to zero over the period.
    CHECK(torus_geodesic_integral(f, {1, 0, 0}, x0, 1024) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("torus integrals are invariant under shifts along the orbit") {
    TorusField f;
    f.n = 2;
    f.eval = [](const std::array<double, 3>& x) {
        return std::cos(kPi * x[0]) * std::cos(2.0 * kPi * x[1]) + 0.3 * std::cos(kPi * 3 * x[0]);
    };
    const std::array<int, 3> k{2, 1, 0};
    const std::array<double, 3> x0{0.11, 0.77, 0.0};
    const double base = torus_geodesic_integral(f, k, x0, 2048);
    for (double shift : {0.25, 0.5, 0.875}) {
        const std::array<double, 3> moved{x0[0] + 2.0 * shift * k[0], x0[1] + 2.0 * shift * k[1],
                                          0.0};
        CHECK(torus_geodesic_integral(f, k, moved, 2048) ==
              doctest::Approx(base).epsilon(1e-11));
    }
}

TEST_CASE("great circle integral: constants, odd harmonics, and the Funk eigenvalue") {
    SphereField one;
    one.eval = [](Vec3) { return 1.0; };
    CHECK(great_circle_integral(one, {0.2, -0.4, 0.88}) == doctest::Approx(kTwoPi).epsilon(1e-12));

    SphereField odd;
    odd.eval = [](Vec3 x) { return real_spherical_harmonic(1, 0, x); };
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 omega = Vec3{g(rng), g(rng), g(rng)}.normalized();
        CHECK(std::abs(great_circle_integral(odd, omega)) < 1e-12);
    }

    SphereField y20;
    y20.eval = [](Vec3 x) { return real_spherical_harmonic(2, 0, x); };
    const double expected =
        kTwoPi * oracles::legendre_p0_closed_form(2) * real_spherical_harmonic(2, 0, {0, 0, 1});
    CHECK(great_circle_integral(y20, {0.0, 0.0, 1.0}) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("periodic brt of f == 1 over a star orbit is the orbit length") {
    const ScalarField2D one = ScalarField2D::analytic([](Vec2) { return 1.0; },
                                                      BoundingBox::centered({0.0, 0.0}, 1.0));
    const BrokenRay orbit = disk_star_orbit(7, 2, 0.4);
    CHECK(periodic_brt(one, orbit) == doctest::Approx(orbit.total_length).epsilon(1e-12));
}

TEST_CASE("periodic brt over cube orbits follows the 1-D antiderivative") {
    // Axis orbit at y = 0.5. cos(pi x) integrates to zero over the round
    // trip; cos(2 pi y) is constant along it.
    const auto f1 = [](const std::array<double, 3>& x) {
        return std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
    };
    const CubeOrbit axis = torus_geodesic_to_cube_orbit(2, {1, 0, 0}, {0.0, 0.5, 0.0});
    CHECK(periodic_brt(f1, axis, QuadratureSpec{512.0}) == doctest::Approx(0.0).epsilon(1e-12));

    const auto f2 = [](const std::array<double, 3>& x) { return std::cos(2.0 * kPi * x[1]); };
    CHECK(periodic_brt(f2, axis, QuadratureSpec{512.0}) ==
          doctest::Approx(2.0 * std::cos(kPi)).epsilon(1e-12));
}

TEST_CASE("octant periodic orbit integral equals the great-circle integral of the unfolding") {
    // Folded-even field: the even extension of its octant restriction is itself.
    SphereField even;
    even.eval = [](Vec3 x) {
        return 0.7 + real_spherical_harmonic(2, 2, x) - 0.4 * real_spherical_harmonic(4, 0, x);
    };
    SphereField octant_restriction;
    octant_restriction.eval = [even](Vec3 x) { return even(octant_fold_point(x)); };
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 omega = Vec3{g(rng), g(rng), g(rng)}.normalized();
        const GreatCircle circle(omega);
        const double via_orbit = periodic_brt(octant_restriction, circle, 2048);
        const double via_unfolding =
            great_circle_integral(octant_unfold_field(octant_restriction), omega, 2048);
        CHECK(via_orbit == doctest::Approx(via_unfolding).epsilon(1e-9));
    }
}

TEST_CASE("sinogram CSV round trip") {
    Sinogram sino(12, 9, 1.05);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < sino.values.size(); ++i) {
        sino.values[i] = unit(rng) * 3.0 - 1.0;
        if (i % 17 == 0) sino.mask[i] = CellMask::Excluded;
        if (i % 23 == 0) sino.mask[i] = CellMask::Interpolated;
    }
    const std::string path = (std::filesystem::temp_directory_path() / "brt_sino.csv").string();
    sino.save_csv(path);
    const Sinogram back = Sinogram::load_csv(path);
    REQUIRE(back.n_angles == sino.n_angles);
    REQUIRE(back.n_offsets == sino.n_offsets);
    CHECK(back.s_max == doctest::Approx(sino.s_max).epsilon(1e-15));
    for (std::size_t i = 0; i < sino.values.size(); ++i) {
        CHECK(back.values[i] == sino.values[i]);
        CHECK(back.mask[i] == sino.mask[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("fill_excluded_cells interpolates interior gaps and zeros the rim") {
    Sinogram sino(4, 9, 1.0);
    for (int a = 0; a < 4; ++a)
        for (int j = 0; j < 9; ++j) sino.at(a, j) = j;
    sino.mask_at(1, 4) = CellMask::Excluded;  // interior gap
    sino.at(1, 4) = -100.0;
    sino.mask_at(2, 0) = CellMask::Excluded;  // rim gap
    sino.at(2, 0) = -100.0;
    fill_excluded_cells(sino);
    CHECK_FALSE(sino.has_excluded());
    CHECK(sino.at(1, 4) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sino.mask_at(1, 4) == CellMask::Interpolated);
    CHECK(sino.at(2, 0) == 0.0);
}

TEST_CASE("gaussian noise depends only on the seed") {
    Sinogram a(6, 7, 1.0), b(6, 7, 1.0);
    add_gaussian_noise(a, 0.1, 42);
    add_gaussian_noise(b, 0.1, 42);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    Sinogram c(6, 7, 1.0);
    add_gaussian_noise(c, 0.1, 43);
    bool different = false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != c.values[i]) different = true;
    CHECK(different);
}
