#include <cmath>
#include <vector>

#include "brt/errors.hpp"
#include "brt/inversion.hpp"
#include "brt/sphharm.hpp"

namespace brt {

double HarmonicTable::at(int l, int m) const {
    auto it = coeffs.find({l, m});
    return it == coeffs.end() ? 0.0 : it->second;
}

double HarmonicTable::evaluate(Vec3 x) const {
    double acc = 0.0;
    for (const auto& [lm, a] : coeffs)
        if (a != 0.0) acc += a * real_spherical_harmonic(lm.first, lm.second, x);
    return acc;
}

double funk_eigenvalue(int l) { return kTwoPi * legendre_p(l, 0.0); }

FunkResult funk_inversion(const CircleData& data, int l_max, const FunkOptions& options) {
    // Product quadrature on the sphere of circle normals, exact well past the
    // band: Gauss-Legendre in cos(theta) x uniform in phi.
    const int n_theta = 2 * l_max + 2;
    const int n_phi = 4 * l_max + 4;
    const GaussLegendreRule rule = gauss_legendre(n_theta);

    std::vector<double> samples(static_cast<std::size_t>(n_theta) * n_phi);
    std::vector<Vec3> nodes(samples.size());
    for (int i = 0; i < n_theta; ++i) {
        const double ct = rule.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = kTwoPi * j / n_phi;
            const Vec3 omega{st * std::cos(phi), st * std::sin(phi), ct};
            const std::size_t idx = static_cast<std::size_t>(i) * n_phi + j;
            nodes[idx] = omega;
            samples[idx] = data(omega);
        }
    }

    FunkResult out;
    out.table.l_max = l_max;
    for (int l = 0; l <= l_max; ++l) {
        for (int m = -l; m <= l; ++m) {
            double d_lm = 0.0;
            for (int i = 0; i < n_theta; ++i) {
                const double w = rule.weights[i] * (kTwoPi / n_phi);
                for (int j = 0; j < n_phi; ++j) {
                    const std::size_t idx = static_cast<std::size_t>(i) * n_phi + j;
                    d_lm += w * samples[idx] * real_spherical_harmonic(l, m, nodes[idx]);
                }
            }
            if (l % 2 == 0) {
                out.table.coeffs[{l, m}] = d_lm / funk_eigenvalue(l);
            } else {
                out.table.coeffs[{l, m}] = 0.0;
                out.odd_energy += d_lm * d_lm;
            }
        }
    }
    if (out.odd_energy > options.odd_energy_tolerance)
        raise(ErrorCode::NonEvenData,
              "circle data carries odd-degree harmonics; it is not the transform of an even field");
    return out;
}

OctantReconstruction reconstruct_octant_periodic(const CircleData& data, int l_max,
                                                 const FunkOptions& options) {
    FunkResult funk = funk_inversion(data, l_max, options);
    OctantReconstruction out;
    out.table = funk.table;
    out.odd_energy = funk.odd_energy;
    const HarmonicTable table = funk.table;
    out.field.eval = [table](Vec3 x) { return table.evaluate(x); };
    return out;
}

}  // namespace brt
