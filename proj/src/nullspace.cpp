#include "brt/nullspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "brt/errors.hpp"
#include "brt/transforms.hpp"

namespace brt {

CylinderGeodesic::CylinderGeodesic(double slope) : b(slope) {
    if (!(b > 0.0) || b > 1.0)
        raise(ErrorCode::DegenerateGeometry, "cylinder slope must lie in (0, 1]");
}

std::string TubeNullReport::to_json() const {
    nlohmann::json j;
    j["check"] = "tube-null";
    j["parameters"] = {{"rays", rays}};
    j["max_residual"] = max_abs_integral;
    j["closed_form_mismatch"] = max_closed_form_mismatch;
    j["pass"] = pass;
    return j.dump(2);
}

TubeNullReport tube_null_check(const RectTube& tube, const RadialProfile& g, int ray_count,
                               std::uint64_t seed, double tolerance, const QuadratureSpec& quad) {
    const double L = tube.length;
    // Zero-mean precondition, checked by quadrature on the profile scale.
    const double g_mean = g.mean(8192);
    if (std::abs(g_mean) * L > 1e-10)
        raise(ErrorCode::InvalidNullProfile, "profile does not integrate to zero");

    // f(x, y) = g(y / L); evaluable slightly beyond the tube for quadrature
    // endpoints.
    const ScalarField2D f = ScalarField2D::analytic(
        [g, L](Vec2 p) { return g(std::clamp(p.y / L, 0.0, 1.0)); },
        BoundingBox{{-0.5 * tube.width, -0.1 * L}, {1.5 * tube.width, 1.1 * L}});
    const double g_integral = g_mean * L;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    TubeNullReport report;
    report.rays = ray_count;
    TraceOptions opts;
    opts.max_reflections = 1 << 16;
    for (int i = 0; i < ray_count; ++i) {
        const double x0 = tube.width * (0.02 + 0.96 * unit(rng));
        const double angle = (unit(rng) - 0.5) * (kPi * 0.9);  // from vertical
        const Vec2 dir{std::sin(angle), std::cos(angle)};
        const BrokenRay ray = rect_tube_trace(tube, {x0, 0.0}, dir, opts);
        const double value = brt_forward(f, ray, AttenuationSpec{}, quad);
        const double closed_form = g_integral / dir.y;
        report.max_abs_integral = std::max(report.max_abs_integral, std::abs(value));
        report.max_closed_form_mismatch =
            std::max(report.max_closed_form_mismatch, std::abs(value - closed_form));
    }
    report.pass = report.max_abs_integral < tolerance;
    return report;
}

std::string DiskNullReport::to_json() const {
    nlohmann::json j;
    j["check"] = "disk-null";
    j["parameters"] = {{"orbits", orbits}};
    j["max_residual"] = max_normalized_residual;
    j["pass"] = pass;
    return j.dump(2);
}

DiskNullReport disk_null_check(const RadialProfile& g, int max_q, int phase_count,
                               double tolerance, const QuadratureSpec& quad) {
    const ScalarField2D f = ScalarField2D::analytic(
        [g](Vec2 p) {
            const double r = p.norm();
            if (r >= 1.0 || r <= 0.0) return 0.0;
            return g(r) * (p.x / r);  // cos(theta)
        },
        BoundingBox::centered({0.0, 0.0}, 1.0));

    DiskNullReport report;
    for (int q = 2; q <= max_q; ++q) {
        for (int p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            for (int ph = 0; ph < phase_count; ++ph) {
                const double phase = kTwoPi * ph / phase_count;
                const BrokenRay orbit = disk_star_orbit(q, p, phase);
                const double value = periodic_brt(f, orbit, quad);
                report.max_normalized_residual = std::max(
                    report.max_normalized_residual, std::abs(value) / orbit.total_length);
                ++report.orbits;
            }
        }
    }
    report.pass = report.max_normalized_residual < tolerance;
    return report;
}

double cylinder_att_forward(const RadialProfile& g, double cylinder_length, double a, double b,
                            const QuadratureSpec& quad) {
    CylinderGeodesic geo(b);
    const double T = geo.duration(cylinder_length);
    return simpson_1d(
        [&](double t) {
            const double u = b * t / cylinder_length;  // g lives on [0, 1]
            return std::exp(-a * t) * g(std::clamp(u, 0.0, 1.0));
        },
        0.0, T, quad.interval_count(T));
}

double laplace_transform(const RadialProfile& g, double cylinder_length, double s,
                         const QuadratureSpec& quad) {
    const double L = cylinder_length;
    return simpson_1d(
        [&](double u) { return std::exp(-s * u) * g(std::clamp(u / L, 0.0, 1.0)); }, 0.0, L,
        quad.interval_count(L));
}

RadialProfile probe_basis_profile(int j) {
    if (j == 0) return RadialProfile([](double) { return 1.0; }, false);
    const int freq = (j + 1) / 2;
    if (j % 2 == 1)
        return RadialProfile([freq](double t) { return std::sin(kTwoPi * freq * t); }, false);
    return RadialProfile([freq](double t) { return std::cos(kTwoPi * freq * t); }, false);
}

std::string ProbeReport::to_json() const {
    nlohmann::json j;
    j["check"] = "cylinder-att-probe";
    j["parameters"] = {{"modes", modes}, {"slopes", slopes}, {"a", a}};
    j["sigma_min"] = sigma_min;
    j["null_vector"] = null_vector;
    j["null_candidate_residual"] = null_candidate_residual;
    j["pass"] = a > 0.0 ? sigma_min > 0.0 : true;
    return j.dump(2);
}

ProbeReport cylinder_injectivity_probe(double a, double cylinder_length, int mode_count,
                                       int slope_count, const QuadratureSpec& quad) {
    if (a < 0.0) raise(ErrorCode::DegenerateGeometry, "attenuation must be nonnegative");
    if (mode_count > slope_count)
        raise(ErrorCode::UnderdeterminedProbe, "more profile modes than slope samples");

    Eigen::MatrixXd A(slope_count, mode_count);
    for (int i = 0; i < slope_count; ++i) {
        const double b = static_cast<double>(i + 1) / slope_count;
        for (int j = 0; j < mode_count; ++j)
            A(i, j) = cylinder_att_forward(probe_basis_profile(j), cylinder_length, a, b, quad);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    ProbeReport report;
    report.modes = mode_count;
    report.slopes = slope_count;
    report.a = a;
    report.sigma_min = svd.singularValues()(mode_count - 1);
    const auto v = svd.matrixV().col(mode_count - 1);
    report.null_vector.assign(v.data(), v.data() + mode_count);

    if (mode_count > 1) {
        // Explicit zero-mean candidate: the first sine mode.
        Eigen::VectorXd e = Eigen::VectorXd::Zero(mode_count);
        e(1) = 1.0;
        report.null_candidate_residual = (A * e).norm();
    }
    return report;
}

}  // namespace brt
