#include <algorithm>
#include <cmath>
#include <vector>

#include <fftw3.h>

#include "brt/errors.hpp"
#include "brt/inversion.hpp"
#include "brt/parallel.hpp"

namespace brt {

GridSpec GridSpec::square(double half_width, int n) {
    GridSpec g;
    g.nx = g.ny = n;
    g.spacing = 2.0 * half_width / (n - 1);
    g.origin = {-half_width, -half_width};
    return g;
}

GridSpec GridSpec::pixel_square(double half_width, int n) {
    GridSpec g;
    g.nx = g.ny = n;
    g.spacing = 2.0 * half_width / n;
    g.origin = {-half_width, -half_width};
    return g;
}

namespace {

/// Ramp-filter every angle row of the sinogram in the frequency domain.
/// Zero-padding x2; optional Hann window over the band. The frequency
/// response is the DFT of the spatial ramp kernel (sampling |nu| directly
/// biases the low frequencies of the periodized filter).
std::vector<double> filter_rows(const Sinogram& sino, bool hann) {
    const int n = sino.n_offsets;
    const int padded = 2 * n;
    const double ds = sino.offset_step();

    std::vector<double> filtered(static_cast<std::size_t>(sino.n_angles) * n);

    std::vector<double> real_buf(padded);
    std::vector<fftw_complex> freq_buf(padded / 2 + 1);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(padded, real_buf.data(), freq_buf.data(), FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(padded, freq_buf.data(), real_buf.data(), FFTW_ESTIMATE);

    // Spatial ramp kernel on the padded circle: 1/(4 ds^2) at 0,
    // -1/(pi m ds)^2 at odd lags, 0 at even lags.
    std::fill(real_buf.begin(), real_buf.end(), 0.0);
    real_buf[0] = 1.0 / (4.0 * ds * ds);
    for (int m = 1; m < n; m += 2) {
        const double v = -1.0 / (kPi * kPi * m * m * ds * ds);
        real_buf[m] = v;
        real_buf[padded - m] = v;
    }
    fftw_execute(fwd);

    // Convolution q = ds * (p * h); fold ds and the 1/padded of the
    // unnormalized c2r into the gain. The kernel DFT is real by symmetry.
    std::vector<double> gain(padded / 2 + 1);
    for (int k = 0; k <= padded / 2; ++k) {
        double g = freq_buf[k][0] * ds / padded;
        if (hann) g *= 0.5 * (1.0 + std::cos(kTwoPi * k / padded));
        gain[k] = g;
    }

    for (int a = 0; a < sino.n_angles; ++a) {
        std::fill(real_buf.begin(), real_buf.end(), 0.0);
        for (int j = 0; j < n; ++j) real_buf[j] = sino.at(a, j);
        fftw_execute(fwd);
        for (int k = 0; k <= padded / 2; ++k) {
            freq_buf[k][0] *= gain[k];
            freq_buf[k][1] *= gain[k];
        }
        fftw_execute(bwd);
        for (int j = 0; j < n; ++j)
            filtered[static_cast<std::size_t>(a) * n + j] = real_buf[j];
    }

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return filtered;
}

}  // namespace

ScalarField2D fbp_reconstruct(const Sinogram& sino, const GridSpec& grid,
                              const FbpOptions& options) {
    if (sino.has_excluded())
        raise(ErrorCode::IncompleteSinogram, "sinogram has excluded cells; fill them first");

    const std::vector<double> filtered = filter_rows(sino, options.hann_window);

    const int n = sino.n_offsets;
    const double ds = sino.offset_step();
    const double s0 = sino.offset(0);

    std::vector<double> cos_a(sino.n_angles), sin_a(sino.n_angles);
    for (int a = 0; a < sino.n_angles; ++a) {
        cos_a[a] = std::cos(sino.angle(a));
        sin_a[a] = std::sin(sino.angle(a));
    }

    std::vector<double> image(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
    const double scale = kPi / sino.n_angles;
    parallel_for_chunks(static_cast<std::size_t>(grid.ny), [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const Vec2 p = grid.node(i, static_cast<int>(j));
                double acc = 0.0;
                for (int a = 0; a < sino.n_angles; ++a) {
                    const double s = p.x * cos_a[a] + p.y * sin_a[a];
                    const double u = (s - s0) / ds;
                    if (u < 0.0 || u > n - 1) continue;
                    const int u0 = std::min(static_cast<int>(u), n - 2);
                    const double w = u - u0;
                    const double* row = &filtered[static_cast<std::size_t>(a) * n];
                    acc += (1.0 - w) * row[u0] + w * row[u0 + 1];
                }
                image[j * grid.nx + i] = acc * scale;
            }
        }
    });

    return ScalarField2D::grid(grid.origin, grid.spacing, grid.nx, grid.ny, std::move(image));
}

/// Sector pullbacks sampled on the source domain: max over sectors of
/// RMS(pullback - mean) normalized by RMS(mean).
double sector_consistency(const DihedralUnfolding& u, const ScalarField2D& unfolded) {
    const int K = u.copy_count;
    const int n_r = 48, n_t = 48;
    std::vector<double> dev_sq(K, 0.0);
    double mean_sq = 0.0;
    std::size_t count = 0;
    std::vector<double> pulls(K);
    for (int it = 0; it < n_t; ++it) {
        const double theta = u.source.alpha * (it + 0.5) / n_t;
        const double h = u.source.h(theta);
        for (int ir = 0; ir < n_r; ++ir) {
            const double r = h * (0.05 + 0.9 * (ir + 0.5) / n_r);
            const Vec2 x = polar(r, theta);
            double mean = 0.0;
            for (int s = 0; s < K; ++s) {
                pulls[s] = unfolded(u.section_point(s, x));
                mean += pulls[s];
            }
            mean /= K;
            for (int s = 0; s < K; ++s) {
                const double d = pulls[s] - mean;
                dev_sq[s] += d * d;
            }
            mean_sq += mean * mean;
            ++count;
        }
    }
    const double rms_mean = std::sqrt(mean_sq / count);
    double worst = 0.0;
    for (int s = 0; s < K; ++s) worst = std::max(worst, std::sqrt(dev_sq[s] / count));
    return rms_mean > 0.0 ? worst / rms_mean : worst;
}

ScalarField2D fold_back_sector_average(const DihedralUnfolding& u,
                                       const ScalarField2D& unfolded) {
    const DihedralUnfolding unf = u;
    const ScalarField2D src = unfolded;
    const int K = u.copy_count;
    auto eval = [unf, src, K](Vec2 x) {
        double acc = 0.0;
        for (int s = 0; s < K; ++s) acc += src(unf.section_point(s, x));
        return acc / K;
    };
    const double R = u.source.max_h();
    return ScalarField2D::analytic(eval, BoundingBox::centered({0.0, 0.0}, R));
}

double relative_l2_error_on_cone(const ConeDomain& domain, const ScalarField2D& reconstruction,
                                 const ScalarField2D& truth, int n) {
    const double R = domain.max_h();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p{-R + 2.0 * R * i / (n - 1), -R + 2.0 * R * j / (n - 1)};
            if (!domain.contains(p)) continue;
            const double t = truth(p);
            const double d = reconstruction(p) - t;
            num += d * d;
            den += t * t;
        }
    if (den <= 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

ConeReconstruction reconstruct_cone_integer(const DihedralUnfolding& u, const BrtOracle& oracle,
                                            const SinogramSpec& sino_spec, const GridSpec& grid,
                                            const FbpOptions& options) {
    if (!u.integer_case)
        raise(ErrorCode::DegenerateGeometry,
              "FBP reconstruction requires an integer-m unfolding (K alpha == 2 pi)");
    const double s_max = sino_spec.s_max > 0.0 ? sino_spec.s_max : 1.05 * u.source.max_h();
    ConeReconstruction out;
    out.sinogram = assemble_sinogram(u, oracle, sino_spec.n_angles, sino_spec.n_offsets, s_max);
    fill_excluded_cells(out.sinogram);
    out.unfolded = fbp_reconstruct(out.sinogram, grid, options);
    out.folded_back = fold_back_sector_average(u, out.unfolded);
    out.sector_consistency = sector_consistency(u, out.unfolded);
    return out;
}

/// Unknowns live only on nodes inside (or one spacing around) the unfolded
/// region; the zero extension outside is known, and rim slivers otherwise
/// dominate the small end of the spectrum.
std::vector<bool> unfolded_region_nodes(const DihedralUnfolding& u, const GridSpec& grid) {
    std::vector<bool> valid(static_cast<std::size_t>(grid.nx) * grid.ny, false);
    const double slack = grid.spacing;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Vec2 c = grid.node(i, j);
            const double r = c.norm();
            if (r <= u.source.tip_epsilon() || r >= u.source.max_h() + slack) continue;
            if (!u.integer_case) {
                const double theta = c.angle();
                const double ang_slack = slack / std::max(r, slack);
                if (theta > u.filler_start + ang_slack && theta < kTwoPi - ang_slack) continue;
            }
            valid[static_cast<std::size_t>(j) * grid.nx + i] = true;
        }
    return valid;
}

ConeCglsReconstruction reconstruct_cone_general(const DihedralUnfolding& u,
                                                const BrtOracle& oracle,
                                                const SinogramSpec& sino_spec,
                                                const GridSpec& grid,
                                                const CglsOptions& options) {
    const double s_max = sino_spec.s_max > 0.0 ? sino_spec.s_max : 1.05 * u.source.max_h();
    ConeCglsReconstruction out;
    out.sinogram = assemble_sinogram(u, oracle, sino_spec.n_angles, sino_spec.n_offsets, s_max);

    std::vector<Line> lines;
    std::vector<double> b;
    for (int a = 0; a < out.sinogram.n_angles; ++a)
        for (int j = 0; j < out.sinogram.n_offsets; ++j)
            if (out.sinogram.mask_at(a, j) == CellMask::Measured) {
                lines.push_back(out.sinogram.line_at(a, j));
                b.push_back(out.sinogram.at(a, j));
            }

    const std::vector<bool> valid = unfolded_region_nodes(u, grid);
    const RayMatrix A = build_interpolating_ray_matrix(lines, grid, &valid);
    std::vector<double> x = cgls_solve(A, b, options, out.report);

    out.unfolded = ScalarField2D::grid(grid.origin, grid.spacing, grid.nx, grid.ny, std::move(x));
    out.folded_back = fold_back_sector_average(u, out.unfolded);
    out.sector_consistency = sector_consistency(u, out.unfolded);
    return out;
}

}  // namespace brt
