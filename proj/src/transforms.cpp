#include "brt/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "brt/errors.hpp"
#include "brt/parallel.hpp"

namespace brt {

const char* cell_mask_name(CellMask mask) {
    switch (mask) {
        case CellMask::Measured: return "measured";
        case CellMask::Excluded: return "excluded";
        case CellMask::Interpolated: return "interpolated";
    }
    return "measured";
}

Sinogram::Sinogram(int angles, int offsets, double smax)
    : n_angles(angles), n_offsets(offsets), s_max(smax) {
    if (angles < 1 || offsets < 2 || smax <= 0.0)
        raise(ErrorCode::DegenerateGeometry, "sinogram needs angles >= 1, offsets >= 2, s_max > 0");
    values.assign(static_cast<std::size_t>(angles) * offsets, 0.0);
    mask.assign(values.size(), CellMask::Measured);
}

bool Sinogram::has_excluded() const {
    return std::find(mask.begin(), mask.end(), CellMask::Excluded) != mask.end();
}

void Sinogram::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << "phi,s,value,mask\n";
    char buf[128];
    for (int a = 0; a < n_angles; ++a)
        for (int j = 0; j < n_offsets; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", angle(a), offset(j), at(a, j),
                          cell_mask_name(mask_at(a, j)));
            out << buf;
        }
    if (!out) raise(ErrorCode::IoError, "write failed for " + path);
}

Sinogram Sinogram::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::string header;
    std::getline(in, header);
    if (header != "phi,s,value,mask") raise(ErrorCode::IoError, "bad sinogram header in " + path);

    std::vector<double> phis, offs, vals;
    std::vector<CellMask> masks;
    std::string row;
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        std::istringstream rs(row);
        std::string tok;
        double cols[3];
        for (double& c : cols) {
            if (!std::getline(rs, tok, ',')) raise(ErrorCode::IoError, "short sinogram row");
            c = std::strtod(tok.c_str(), nullptr);
        }
        if (!std::getline(rs, tok)) raise(ErrorCode::IoError, "missing mask column");
        CellMask m = CellMask::Measured;
        if (tok == "excluded")
            m = CellMask::Excluded;
        else if (tok == "interpolated")
            m = CellMask::Interpolated;
        else if (tok != "measured")
            raise(ErrorCode::IoError, "unknown mask value '" + tok + "'");
        phis.push_back(cols[0]);
        offs.push_back(cols[1]);
        vals.push_back(cols[2]);
        masks.push_back(m);
    }
    if (vals.empty()) raise(ErrorCode::IoError, "empty sinogram file " + path);

    int n_offsets = 1;
    while (n_offsets < static_cast<int>(offs.size()) && offs[n_offsets] > offs[n_offsets - 1])
        ++n_offsets;
    const int n_angles = static_cast<int>(vals.size()) / n_offsets;
    if (static_cast<std::size_t>(n_angles) * n_offsets != vals.size())
        raise(ErrorCode::IoError, "ragged sinogram table in " + path);
    Sinogram sino(n_angles, n_offsets, std::max(std::abs(offs.front()), std::abs(offs.back())));
    sino.values = std::move(vals);
    sino.mask = std::move(masks);
    return sino;
}

double brt_forward(const ScalarField2D& field, const BrokenRay& ray, AttenuationSpec att,
                   const QuadratureSpec& quad) {
    double total = 0.0;
    double accumulated = 0.0;
    for (int s = 0; s < ray.segment_count(); ++s) {
        const Vec2 a = ray.vertices[s];
        const Vec2 b = ray.vertices[s + 1];
        total += integrate_segment(field, a, b, AttenuationWeight{att.h, accumulated}, quad);
        accumulated += (b - a).norm();
    }
    return total;
}

double radon_forward(const ScalarField2D& field, const Line& line, const QuadratureSpec& quad) {
    double t0 = 0.0, t1 = 0.0;
    if (!clip_line_to_box(line, field.support(), t0, t1) || t1 - t0 <= 0.0) return 0.0;
    // Pull the endpoints a hair inside the box so rounding in the clip can
    // not zero the endpoint samples.
    const double nudge = 1e-12 * (t1 - t0);
    return integrate_segment(field, line.point_at(t0 + nudge), line.point_at(t1 - nudge),
                             AttenuationWeight::unit(), quad);
}

Sinogram assemble_sinogram(const DihedralUnfolding& u, const BrtOracle& oracle, int n_angles,
                           int n_offsets, double s_max, const TraceOptions& opts) {
    Sinogram sino(n_angles, n_offsets, s_max);
    const std::size_t cells = sino.values.size();
    parallel_for(cells, [&](std::size_t idx) {
        const int a = static_cast<int>(idx) / n_offsets;
        const int j = static_cast<int>(idx) % n_offsets;
        try {
            const FoldedLine folded = fold_line(u, sino.line_at(a, j), opts);
            sino.values[idx] = oracle(folded.ray);
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::ApexLine:
                case ErrorCode::FillerConeHit:
                case ErrorCode::EmptyIntersection:
                case ErrorCode::TipHit:
                    sino.mask[idx] = CellMask::Excluded;
                    break;
                default:
                    throw;
            }
        }
    });
    if (std::find(sino.mask.begin(), sino.mask.end(), CellMask::Measured) == sino.mask.end())
        raise(ErrorCode::DegenerateGeometry, "every sinogram cell is excluded");
    return sino;
}

void fill_excluded_cells(Sinogram& sino) {
    for (int a = 0; a < sino.n_angles; ++a) {
        for (int j = 0; j < sino.n_offsets; ++j) {
            if (sino.mask_at(a, j) != CellMask::Excluded) continue;
            int lo = j - 1;
            while (lo >= 0 && sino.mask_at(a, lo) == CellMask::Excluded) --lo;
            int hi = j + 1;
            while (hi < sino.n_offsets && sino.mask_at(a, hi) == CellMask::Excluded) ++hi;
            const bool has_lo = lo >= 0;
            const bool has_hi = hi < sino.n_offsets;
            double v = 0.0;
            if (has_lo && has_hi) {
                const double w = static_cast<double>(j - lo) / (hi - lo);
                v = (1.0 - w) * sino.at(a, lo) + w * sino.at(a, hi);
            }
            // One-sided gaps sit past the domain edge where the true line
            // integral is zero.
            sino.at(a, j) = v;
            sino.mask_at(a, j) = CellMask::Interpolated;
        }
    }
}

void add_gaussian_noise(Sinogram& sino, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t i = 0; i < sino.values.size(); ++i) {
        const double draw = gauss(rng);  // one draw per cell keeps the stream aligned
        if (sino.mask[i] == CellMask::Measured) sino.values[i] += draw;
    }
}

double torus_geodesic_integral(const TorusField& field, const std::array<int, 3>& k,
                               const std::array<double, 3>& x0, int nodes) {
    double k_norm2 = 0.0;
    for (int i = 0; i < field.n; ++i) k_norm2 += double(k[i]) * k[i];
    if (k_norm2 == 0.0) raise(ErrorCode::InvalidOrbit, "k must be nonzero");
    const double length = 2.0 * std::sqrt(k_norm2);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double t = static_cast<double>(i) / nodes;
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < field.n; ++a) x[a] = x0[a] + 2.0 * t * k[a];
        sum += field(x);
    }
    return sum / nodes * length;
}

double great_circle_integral(const SphereField& field, Vec3 omega, int nodes) {
    const GreatCircle circle(omega);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) sum += field(circle.point_at(kTwoPi * i / nodes));
    return sum / nodes * kTwoPi;
}

double periodic_brt(const ScalarField2D& field, const BrokenRay& orbit,
                    const QuadratureSpec& quad) {
    return brt_forward(field, orbit, AttenuationSpec{}, quad);
}

double periodic_brt(const std::function<double(const std::array<double, 3>&)>& field,
                    const CubeOrbit& orbit, const QuadratureSpec& quad) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < orbit.vertices.size(); ++s) {
        const auto& a = orbit.vertices[s];
        const auto& b = orbit.vertices[s + 1];
        double len2 = 0.0;
        for (int i = 0; i < orbit.n; ++i) len2 += (b[i] - a[i]) * (b[i] - a[i]);
        const double len = std::sqrt(len2);
        if (len <= 0.0) continue;
        total += len * simpson_1d(
                           [&](double t) {
                               std::array<double, 3> x{0.0, 0.0, 0.0};
                               for (int i = 0; i < orbit.n; ++i)
                                   x[i] = a[i] + (b[i] - a[i]) * t;
                               return field(x);
                           },
                           0.0, 1.0, quad.interval_count(len));
    }
    return total;
}

double periodic_brt(const SphereField& octant_field, const GreatCircle& circle, int nodes) {
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i)
        sum += octant_field(octant_fold_point(circle.point_at(kTwoPi * i / nodes)));
    return sum / nodes * kTwoPi;
}

}  // namespace brt
