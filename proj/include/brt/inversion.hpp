#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brt/fields.hpp"
#include "brt/geom.hpp"
#include "brt/transforms.hpp"
#include "brt/unfolding.hpp"

namespace brt {

/// Square reconstruction grid; origin is the first sample node.
struct GridSpec {
    Vec2 origin{-1.0, -1.0};
    double spacing{1.0};
    int nx{2};
    int ny{2};

    static GridSpec square(double half_width, int n);
    /// Pixel-centered variant: n pixels of width 2*half_width/n per axis.
    static GridSpec pixel_square(double half_width, int n);
    Vec2 node(int i, int j) const { return origin + Vec2{spacing * i, spacing * j}; }
    Vec2 pixel_center(int i, int j) const {
        return origin + Vec2{spacing * (i + 0.5), spacing * (j + 0.5)};
    }
};

struct FbpOptions {
    bool hann_window{true};
};

/// Filtered backprojection of a complete sinogram (frequency-domain ramp,
/// zero-padding x2, optional Hann window, linear interpolation in offset).
/// Excluded cells must be filled first; raises IncompleteSinogram otherwise.
ScalarField2D fbp_reconstruct(const Sinogram& sino, const GridSpec& grid,
                              const FbpOptions& options = {});

struct SinogramSpec {
    int n_angles{360};
    int n_offsets{257};
    /// Offset range; defaults to 1.05 * max h when <= 0.
    double s_max{0.0};
};

struct ConeReconstruction {
    ScalarField2D unfolded;     // FBP/CGLS output on the plane grid
    ScalarField2D folded_back;  // average of the sector pullbacks, evaluable on the cone
    Sinogram sinogram;
    /// Max over sectors of RMS(pullback - mean) / RMS(mean), sampled on the
    /// source domain.
    double sector_consistency{0.0};
};

/// Full-turn (integer m) pipeline: assemble the sinogram through the
/// unfolding, reconstruct the reflected field by FBP, fold back by averaging
/// the 2m sector pullbacks.
ConeReconstruction reconstruct_cone_integer(const DihedralUnfolding& u, const BrtOracle& oracle,
                                            const SinogramSpec& sino_spec, const GridSpec& grid,
                                            const FbpOptions& options = {});

/// Average of the K sector pullbacks of a reconstructed plane field,
/// evaluable on the source cone.
ScalarField2D fold_back_sector_average(const DihedralUnfolding& u, const ScalarField2D& unfolded);

/// Max over sectors of RMS(pullback - mean) / RMS(mean), sampled on the
/// source domain.
double sector_consistency(const DihedralUnfolding& u, const ScalarField2D& unfolded);

/// Relative L2 error of a reconstruction against the truth over the cone
/// interior, sampled on an n x n cartesian grid.
double relative_l2_error_on_cone(const ConeDomain& domain, const ScalarField2D& reconstruction,
                                 const ScalarField2D& truth, int n = 256);

struct CglsOptions {
    int max_iterations{500};
    double tolerance{1e-6};
    /// Stagnation window for the SlowConvergence warning.
    int stagnation_window{50};
    double stagnation_decrease{1e-3};
};

struct CglsReport {
    std::vector<double> residual_history;  // ||b - A x_k||, k = 0..
    bool slow_convergence{false};
    int iterations{0};
    /// Empirical extreme singular value estimates of the ray matrix (Ritz
    /// values of the CGLS tridiagonal).
    double sigma_max_estimate{0.0};
    double sigma_min_estimate{0.0};
};

struct ConeCglsReconstruction {
    ScalarField2D unfolded;
    ScalarField2D folded_back;
    Sinogram sinogram;
    CglsReport report;
    double sector_consistency{0.0};
};

/// General-angle pipeline: conjugate-gradient least squares on the measured
/// lines only, with a sparse pixel-intersection-length forward matrix.
ConeCglsReconstruction reconstruct_cone_general(const DihedralUnfolding& u,
                                                const BrtOracle& oracle,
                                                const SinogramSpec& sino_spec,
                                                const GridSpec& grid,
                                                const CglsOptions& options = {});

/// Sparse CSR ray-pixel matrix (grid cells as piecewise-constant pixels).
struct RayMatrix {
    int n_rows{0};
    int n_cols{0};
    std::vector<std::size_t> row_ptr;
    std::vector<int> cols;
    std::vector<double> vals;

    void multiply(std::span<const double> x, std::span<double> y) const;
    void multiply_transposed(std::span<const double> y, std::span<double> x) const;
};

/// Intersection lengths of each line with the pixels of the grid
/// (incremental traversal, one row per line). Cells where valid_pixels is
/// false are skipped (their columns stay empty).
RayMatrix build_ray_matrix(const std::vector<Line>& lines, const GridSpec& grid,
                           const std::vector<bool>* valid_pixels = nullptr);

/// Bilinear-footprint projector on the node grid: each row integrates the
/// bilinearly interpolated field along the line (major-axis stepping). The
/// smooth footprint keeps the discretization gap out of the weakly
/// determined part of the spectrum, which the pixel model pollutes.
RayMatrix build_interpolating_ray_matrix(const std::vector<Line>& lines, const GridSpec& grid,
                                         const std::vector<bool>* valid_nodes = nullptr);

/// CGLS on ||A x - b||; returns the solution and the residual report.
std::vector<double> cgls_solve(const RayMatrix& A, std::span<const double> b,
                               const CglsOptions& options, CglsReport& report);

// --- Torus Fourier inversion ---------------------------------------------------

/// Coefficients c_m of f(x) = sum c_m exp(i pi m . x) on the period-2 torus,
/// |m|_inf <= band.
struct FourierTable {
    int n{2};
    int band{0};
    std::map<std::array<int, 3>, std::complex<double>> coeffs;

    std::complex<double> at(const std::array<int, 3>& m) const;
    double evaluate(const std::array<double, 3>& x) const;
    /// Largest |c_m - conj(c_-m)| (zero for data from a real field).
    double conjugate_symmetry_residual() const;
    /// Largest |c_m - c_m'| over single-axis sign flips (zero for folded,
    /// i.e. even, fields).
    double fold_symmetry_residual() const;
};

using TorusData = std::function<double(const std::array<int, 3>&, const std::array<double, 3>&)>;

/// One measured closed-geodesic integral (kept for data artifacts).
struct TorusSample {
    std::array<int, 3> k;
    std::array<double, 3> x0;
    double value;
};

/// Recover the Fourier coefficients of a band-limited torus field from its
/// closed-geodesic integrals: per frequency direction, a perpendicular
/// primitive k and a 2B+1-point offset family resolved by a DFT. When
/// record is non-null every queried sample is appended in query order.
FourierTable torus_fourier_inversion(int n, const TorusData& data, int band,
                                     std::vector<TorusSample>* record = nullptr);

/// Minimal-norm primitive integer vector orthogonal to m (n = 2: the exact
/// perpendicular; n = 3: lexicographically smallest among minimal-norm
/// solutions). With band > 0 the n = 3 search additionally requires that no
/// other frequency inside the band is orthogonal to k unless it is a
/// multiple of m: the offset-family DFT then isolates each coefficient
/// exactly.
std::array<int, 3> perpendicular_primitive(int n, const std::array<int, 3>& m, int band = 0);

struct CubeReconstruction {
    FourierTable table;
    std::function<double(const std::array<double, 3>&)> field;  // on [0,1]^n
    std::vector<TorusSample> samples;                           // data actually queried
};

using CubeOrbitData = std::function<double(const CubeOrbit&)>;

/// Periodic broken ray inversion in the unit cube: lift orbits to torus
/// geodesics through the folding, invert there, restrict back.
CubeReconstruction reconstruct_cube_periodic(int n, const CubeOrbitData& data, int band);

// --- Funk inversion -------------------------------------------------------------

struct HarmonicTable {
    int l_max{0};
    std::map<std::pair<int, int>, double> coeffs;  // (l, m) -> a_lm

    double at(int l, int m) const;
    double evaluate(Vec3 x) const;
};

/// Funk transform eigenvalue on degree-l harmonics: 2 pi P_l(0).
double funk_eigenvalue(int l);

struct FunkResult {
    HarmonicTable table;
    /// Energy of the data in odd-degree harmonics; genuine great-circle data
    /// has none.
    double odd_energy{0.0};
};

using CircleData = std::function<double(Vec3)>;  // omega -> circle integral

struct FunkOptions {
    /// Raise NonEvenData when the odd-degree data energy exceeds this.
    double odd_energy_tolerance{1e-8};
};

/// Invert great-circle data into spherical-harmonic coefficients: project the
/// data (a function of the circle normal) onto harmonics with a product
/// Gauss-Legendre x uniform rule, divide even degrees by 2 pi P_l(0).
FunkResult funk_inversion(const CircleData& data, int l_max, const FunkOptions& options = {});

struct OctantReconstruction {
    HarmonicTable table;
    SphereField field;  // evaluable on the octant
    double odd_energy{0.0};
};

/// Periodic broken ray inversion on the sphere octant: each periodic orbit
/// is the fold of a great circle, so the data is Funk data of the even
/// unfolding.
OctantReconstruction reconstruct_octant_periodic(const CircleData& data, int l_max,
                                                 const FunkOptions& options = {});

}  // namespace brt
