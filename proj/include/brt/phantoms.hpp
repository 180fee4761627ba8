#pragma once

#include <array>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "brt/fields.hpp"
#include "brt/geom.hpp"

namespace brt {

enum class SymmetryClass { None, FoldOfTorusField, EvenSpherical, NOddAtBoundary };

const char* symmetry_class_name(SymmetryClass c);

/// Parameter bundle for the analytic phantom registry. Planar keys:
/// "gaussian", "bump", "disk", "radial_cos". Torus key: "torus_cosines"
/// (list of integer modes). Sphere key: "harmonics" (list of (l, m, coef)).
struct PhantomSpec {
    std::string key;

    // planar parameters
    Vec2 center{0.0, 0.0};
    double amplitude{1.0};
    double sigma{0.15};
    double radius{0.3};
    int angular_k{1};
    double r0{0.2};
    double r1{0.8};

    // torus / cube parameters
    int n{2};
    std::vector<std::pair<std::array<int, 3>, double>> modes;

    // sphere parameters
    std::vector<std::tuple<int, int, double>> harmonics;

    SymmetryClass symmetry{SymmetryClass::None};

    std::string to_json() const;
};

/// Smooth compactly supported bump: exp(1 - 1/(1 - u^2)) on |u| < 1, 0
/// outside; peak value 1.
double smooth_bump(double u);

/// Build a planar phantom and verify its declared symmetry by sampling
/// (FieldError on failure).
ScalarField2D make_planar_phantom(const PhantomSpec& spec);

/// Cosine-product torus field from the mode list; band = max |m|_inf.
TorusField make_torus_phantom(const PhantomSpec& spec);
int torus_phantom_band(const PhantomSpec& spec);

/// Restriction of the torus phantom to the unit cube (the fold section).
std::function<double(const std::array<double, 3>&)> make_cube_phantom(const PhantomSpec& spec);

/// Real spherical-harmonic combination.
SphereField make_sphere_phantom(const PhantomSpec& spec);
int sphere_phantom_l_max(const PhantomSpec& spec);

/// Radial profile registry for the nullspace checks: "sin" (zero-mean mode),
/// "cos", "const", "bump" (compact, not zero-mean), "bump_pair" (zero-mean
/// difference of bumps), "exp" (truncated exponential).
RadialProfile make_radial_profile(const std::string& key, double p1 = 1.0, double p2 = 0.0);

/// Named phantom presets used by the scenario runner.
PhantomSpec phantom_preset(const std::string& name);

}  // namespace brt
