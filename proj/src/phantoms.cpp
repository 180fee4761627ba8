#include "brt/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "brt/errors.hpp"
#include "brt/sphharm.hpp"

namespace brt {

const char* symmetry_class_name(SymmetryClass c) {
    switch (c) {
        case SymmetryClass::None: return "none";
        case SymmetryClass::FoldOfTorusField: return "fold-of-torus-field";
        case SymmetryClass::EvenSpherical: return "even-spherical";
        case SymmetryClass::NOddAtBoundary: return "n-odd-at-boundary";
    }
    return "none";
}

double smooth_bump(double u) {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

std::string PhantomSpec::to_json() const {
    nlohmann::json j;
    j["key"] = key;
    j["symmetry"] = symmetry_class_name(symmetry);
    j["amplitude"] = amplitude;
    if (key == "gaussian" || key == "bump" || key == "disk") {
        j["center"] = {center.x, center.y};
        j[key == "gaussian" ? "sigma" : "radius"] = key == "gaussian" ? sigma : radius;
    } else if (key == "radial_cos") {
        j["angular_k"] = angular_k;
        j["r0"] = r0;
        j["r1"] = r1;
    } else if (key == "torus_cosines") {
        j["n"] = n;
        auto& arr = j["modes"];
        arr = nlohmann::json::array();
        for (const auto& [m, c] : modes) arr.push_back({{"m", {m[0], m[1], m[2]}}, {"coef", c}});
    } else if (key == "harmonics") {
        auto& arr = j["harmonics"];
        arr = nlohmann::json::array();
        for (const auto& [l, m, c] : harmonics) arr.push_back({{"l", l}, {"m", m}, {"coef", c}});
    }
    return j.dump();
}

namespace {

constexpr std::uint64_t kVerifySeed = 0x5EEDF00D;
constexpr int kVerifySamples = 1000;
constexpr double kVerifyTol = 1e-9;

void verify_torus_fold_symmetry(const TorusField& field) {
    std::mt19937_64 rng(kVerifySeed);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (int s = 0; s < kVerifySamples; ++s) {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int i = 0; i < field.n; ++i) x[i] = unit(rng);
        const double base = field(x);
        for (int axis = 0; axis < field.n; ++axis) {
            auto reflected = x;
            reflected[axis] = 2.0 - x[axis];
            if (std::abs(field(reflected) - base) > kVerifyTol)
                raise(ErrorCode::FieldError, "symmetry verification failure: torus field not even");
        }
    }
}

void verify_even_spherical(const SphereField& field) {
    std::mt19937_64 rng(kVerifySeed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < kVerifySamples; ++s) {
        Vec3 x{gauss(rng), gauss(rng), gauss(rng)};
        if (x.norm() < 1e-6) continue;
        x = x.normalized();
        if (std::abs(field(x) - field(-x)) > kVerifyTol)
            raise(ErrorCode::FieldError, "symmetry verification failure: sphere field not even");
    }
}

}  // namespace

ScalarField2D make_planar_phantom(const PhantomSpec& spec) {
    if (spec.symmetry != SymmetryClass::None)
        raise(ErrorCode::FieldError, "planar phantoms carry no symmetry class");
    const double A = spec.amplitude;
    if (spec.key == "gaussian") {
        const Vec2 c = spec.center;
        const double s2 = 2.0 * spec.sigma * spec.sigma;
        // Support out at 9 sigma, where the tail is below machine precision.
        const double half = 9.0 * spec.sigma;
        return ScalarField2D::analytic(
            [c, s2, A](Vec2 p) { return A * std::exp(-(p - c).squared_norm() / s2); },
            BoundingBox::centered(c, half));
    }
    if (spec.key == "bump") {
        const Vec2 c = spec.center;
        const double R = spec.radius;
        return ScalarField2D::analytic(
            [c, R, A](Vec2 p) { return A * smooth_bump((p - c).norm() / R); },
            BoundingBox::centered(c, R));
    }
    if (spec.key == "disk") {
        const Vec2 c = spec.center;
        const double R = spec.radius;
        return ScalarField2D::analytic(
            [c, R, A](Vec2 p) { return (p - c).norm() < R ? A : 0.0; },
            BoundingBox::centered(c, R));
    }
    if (spec.key == "radial_cos") {
        const int k = spec.angular_k;
        const double r0 = spec.r0, r1 = spec.r1;
        const double rmid = 0.5 * (r0 + r1), rhw = 0.5 * (r1 - r0);
        return ScalarField2D::analytic(
            [k, rmid, rhw, A](Vec2 p) {
                const double r = p.norm();
                if (r <= 0.0) return 0.0;
                return A * smooth_bump((r - rmid) / rhw) * std::cos(k * std::atan2(p.y, p.x));
            },
            BoundingBox::centered({0.0, 0.0}, rmid + rhw));
    }
    raise(ErrorCode::FieldError, "unknown planar phantom key '" + spec.key + "'");
}

TorusField make_torus_phantom(const PhantomSpec& spec) {
    if (spec.key != "torus_cosines")
        raise(ErrorCode::FieldError, "unknown torus phantom key '" + spec.key + "'");
    if (spec.symmetry != SymmetryClass::FoldOfTorusField &&
        spec.symmetry != SymmetryClass::NOddAtBoundary)
        raise(ErrorCode::FieldError, "torus phantoms must declare a fold symmetry class");
    TorusField field;
    field.n = spec.n;
    const auto modes = spec.modes;
    const int n = spec.n;
    field.eval = [modes, n](const std::array<double, 3>& x) {
        double acc = 0.0;
        for (const auto& [m, c] : modes) {
            double term = c;
            for (int i = 0; i < n; ++i) term *= std::cos(kPi * m[i] * x[i]);
            acc += term;
        }
        return acc;
    };
    verify_torus_fold_symmetry(field);
    return field;
}

int torus_phantom_band(const PhantomSpec& spec) {
    int band = 0;
    for (const auto& [m, c] : spec.modes)
        for (int i = 0; i < spec.n; ++i) band = std::max(band, std::abs(m[i]));
    return band;
}

std::function<double(const std::array<double, 3>&)> make_cube_phantom(const PhantomSpec& spec) {
    const TorusField torus = make_torus_phantom(spec);
    return [torus](const std::array<double, 3>& x) { return torus(x); };
}

SphereField make_sphere_phantom(const PhantomSpec& spec) {
    if (spec.key != "harmonics")
        raise(ErrorCode::FieldError, "unknown sphere phantom key '" + spec.key + "'");
    SphereField field;
    const auto harmonics = spec.harmonics;
    field.eval = [harmonics](Vec3 x) {
        double acc = 0.0;
        for (const auto& [l, m, c] : harmonics) acc += c * real_spherical_harmonic(l, m, x);
        return acc;
    };
    if (spec.symmetry == SymmetryClass::EvenSpherical) verify_even_spherical(field);
    return field;
}

int sphere_phantom_l_max(const PhantomSpec& spec) {
    int l_max = 0;
    for (const auto& [l, m, c] : spec.harmonics) l_max = std::max(l_max, l);
    return l_max;
}

RadialProfile make_radial_profile(const std::string& key, double p1, double p2) {
    if (key == "sin") {
        const int freq = std::max(1, static_cast<int>(std::lround(p1)));
        return RadialProfile([freq](double t) { return std::sin(kTwoPi * freq * t); }, false);
    }
    if (key == "cos") {
        const int freq = std::max(1, static_cast<int>(std::lround(p1)));
        return RadialProfile([freq](double t) { return std::cos(kTwoPi * freq * t); }, false);
    }
    if (key == "const") return RadialProfile([p1](double) { return p1; }, false);
    if (key == "bump") {
        const double c = p1 > 0.0 ? p1 : 0.5;
        const double w = p2 > 0.0 ? p2 : 0.3;
        return RadialProfile([c, w](double t) { return smooth_bump((t - c) / w); },
                             c - w > 0.04 && c + w < 0.96, std::min(c - w, 1.0 - c - w));
    }
    if (key == "bump_pair") {
        // Zero-mean by antisymmetry about t = 1/2.
        const double off = p1 > 0.0 && p1 < 0.25 ? p1 : 0.22;
        const double w = p2 > 0.0 ? p2 : 0.18;
        return RadialProfile(
            [off, w](double t) {
                return smooth_bump((t - (0.5 - off)) / w) - smooth_bump((t - (0.5 + off)) / w);
            },
            true, 0.05);
    }
    if (key == "exp") return RadialProfile([p1](double t) { return std::exp(-p1 * t); }, false);
    raise(ErrorCode::FieldError, "unknown radial profile key '" + key + "'");
}

PhantomSpec phantom_preset(const std::string& name) {
    PhantomSpec spec;
    if (name == "cube-n2-b8") {
        spec.key = "torus_cosines";
        spec.n = 2;
        spec.symmetry = SymmetryClass::NOddAtBoundary;
        spec.modes = {{{0, 0, 0}, 0.6},  {{1, 0, 0}, 0.9},  {{0, 2, 0}, -0.5},
                      {{1, 2, 0}, 0.45}, {{3, 1, 0}, 0.3},  {{5, 4, 0}, -0.25},
                      {{8, 0, 0}, 0.2},  {{2, 8, 0}, 0.15}, {{7, 6, 0}, -0.1}};
        return spec;
    }
    if (name == "cube-n3-b4") {
        spec.key = "torus_cosines";
        spec.n = 3;
        spec.symmetry = SymmetryClass::NOddAtBoundary;
        spec.modes = {{{0, 0, 0}, 0.5},
                      {{1, 0, 0}, 0.8},
                      {{0, 1, 2}, -0.4},
                      {{2, 2, 1}, 0.3},
                      {{4, 1, 0}, 0.25},
                      {{3, 4, 2}, -0.15},
                      {{1, 2, 4}, 0.1}};
        return spec;
    }
    if (name == "octant-even-l6") {
        spec.key = "harmonics";
        spec.symmetry = SymmetryClass::EvenSpherical;
        // Octant-symmetric: even l, even m, cosine harmonics only.
        spec.harmonics = {{0, 0, 0.8}, {2, 0, 0.5},  {2, 2, -0.35},
                          {4, 0, 0.3}, {4, 4, 0.25}, {6, 2, -0.2},
                          {6, 6, 0.15}};
        return spec;
    }
    if (name == "octant-odd") {
        spec.key = "harmonics";
        spec.symmetry = SymmetryClass::None;
        spec.harmonics = {{1, 0, 0.7}, {3, 2, 0.4}, {5, -3, 0.3}};
        return spec;
    }
    raise(ErrorCode::FieldError, "unknown phantom preset '" + name + "'");
}

}  // namespace brt
