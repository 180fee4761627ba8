#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "brt/errors.hpp"
#include "brt/inversion.hpp"
#include "brt/parallel.hpp"

namespace brt {

void RayMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    parallel_for_chunks(static_cast<std::size_t>(n_rows), [&](std::size_t rb, std::size_t re) {
        for (std::size_t r = rb; r < re; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                acc += vals[k] * x[static_cast<std::size_t>(cols[k])];
            y[r] = acc;
        }
    });
}

namespace {

struct Traversal {
    std::vector<std::pair<int, double>> cells;  // (pixel index, intersection length)
};

/// March the line through the pixel grid, recording intersection lengths.
Traversal traverse(const Line& line, const GridSpec& grid) {
    Traversal out;
    const BoundingBox box{grid.origin,
                          grid.origin + Vec2{grid.spacing * grid.nx, grid.spacing * grid.ny}};
    double t0 = 0.0, t1 = 0.0;
    if (!clip_line_to_box(line, box, t0, t1) || t1 - t0 <= 1e-14) return out;

    const Vec2 d = line.direction();
    const double eps = 1e-12 * grid.spacing;
    Vec2 p = line.point_at(t0 + eps);
    int ix = std::clamp(static_cast<int>((p.x - grid.origin.x) / grid.spacing), 0, grid.nx - 1);
    int iy = std::clamp(static_cast<int>((p.y - grid.origin.y) / grid.spacing), 0, grid.ny - 1);

    const int step_x = d.x > 0 ? 1 : -1;
    const int step_y = d.y > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const auto boundary_x = [&](int i) { return grid.origin.x + grid.spacing * i; };
    const auto boundary_y = [&](int j) { return grid.origin.y + grid.spacing * j; };

    double t = t0;
    // Parameter values where the line crosses the next x/y pixel boundary.
    const Vec2 start = line.point_at(0.0);
    double t_max_x = d.x != 0.0 ? (boundary_x(ix + (step_x > 0 ? 1 : 0)) - start.x) / d.x : inf;
    double t_max_y = d.y != 0.0 ? (boundary_y(iy + (step_y > 0 ? 1 : 0)) - start.y) / d.y : inf;
    const double t_delta_x = d.x != 0.0 ? grid.spacing / std::abs(d.x) : inf;
    const double t_delta_y = d.y != 0.0 ? grid.spacing / std::abs(d.y) : inf;

    while (t < t1 - 1e-14) {
        const double t_next = std::min({t_max_x, t_max_y, t1});
        const double len = t_next - t;
        if (len > 0.0) out.cells.emplace_back(iy * grid.nx + ix, len);
        if (t_next >= t1 - 1e-14) break;
        if (t_max_x <= t_max_y) {
            ix += step_x;
            t_max_x += t_delta_x;
            if (ix < 0 || ix >= grid.nx) break;
        } else {
            iy += step_y;
            t_max_y += t_delta_y;
            if (iy < 0 || iy >= grid.ny) break;
        }
        t = t_next;
    }
    return out;
}

}  // namespace

void RayMatrix::multiply_transposed(std::span<const double> y, std::span<double> x) const {
    // The caller stores A^T as a RayMatrix too; this fallback handles odd
    // uses deterministically (serial scatter).
    std::fill(x.begin(), x.end(), 0.0);
    for (int r = 0; r < n_rows; ++r)
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            x[static_cast<std::size_t>(cols[k])] += vals[k] * y[static_cast<std::size_t>(r)];
}

RayMatrix build_ray_matrix(const std::vector<Line>& lines, const GridSpec& grid,
                           const std::vector<bool>* valid_pixels) {
    RayMatrix A;
    A.n_rows = static_cast<int>(lines.size());
    A.n_cols = grid.nx * grid.ny;
    A.row_ptr.assign(lines.size() + 1, 0);

    std::vector<Traversal> rows(lines.size());
    parallel_for(lines.size(), [&](std::size_t i) {
        rows[i] = traverse(lines[i], grid);
        if (valid_pixels) {
            auto& cells = rows[i].cells;
            std::erase_if(cells, [&](const std::pair<int, double>& c) {
                return !(*valid_pixels)[static_cast<std::size_t>(c.first)];
            });
        }
    });

    for (std::size_t i = 0; i < rows.size(); ++i)
        A.row_ptr[i + 1] = A.row_ptr[i] + rows[i].cells.size();
    A.cols.resize(A.row_ptr.back());
    A.vals.resize(A.row_ptr.back());
    parallel_for(rows.size(), [&](std::size_t i) {
        std::size_t k = A.row_ptr[i];
        for (const auto& [cell, len] : rows[i].cells) {
            A.cols[k] = cell;
            A.vals[k] = len;
            ++k;
        }
    });
    return A;
}

RayMatrix build_interpolating_ray_matrix(const std::vector<Line>& lines, const GridSpec& grid,
                                         const std::vector<bool>* valid_nodes) {
    RayMatrix A;
    A.n_rows = static_cast<int>(lines.size());
    A.n_cols = grid.nx * grid.ny;
    A.row_ptr.assign(lines.size() + 1, 0);

    const BoundingBox box{grid.origin,
                          grid.origin + Vec2{grid.spacing * (grid.nx - 1),
                                             grid.spacing * (grid.ny - 1)}};
    std::vector<Traversal> rows(lines.size());
    parallel_for(lines.size(), [&](std::size_t r) {
        const Line& line = lines[r];
        double t0 = 0.0, t1 = 0.0;
        if (!clip_line_to_box(line, box, t0, t1) || t1 - t0 <= 1e-12) return;
        const Vec2 p = line.point_at(0.0);
        const Vec2 d = line.direction();
        auto& cells = rows[r].cells;
        const bool x_major = std::abs(d.x) >= std::abs(d.y);
        // Step one node plane at a time along the major axis; the weight is
        // the arclength per plane, split bilinearly over the two minor-axis
        // neighbors.
        const double ax_d = x_major ? d.x : d.y;
        const double step_len = grid.spacing / std::abs(ax_d);
        const double lo = x_major ? (p.x + t0 * d.x) : (p.y + t0 * d.y);
        const double hi = x_major ? (p.x + t1 * d.x) : (p.y + t1 * d.y);
        const double ax_origin = x_major ? grid.origin.x : grid.origin.y;
        const int n_major = x_major ? grid.nx : grid.ny;
        const int n_minor = x_major ? grid.ny : grid.nx;
        const double lo_ax = std::min(lo, hi), hi_ax = std::max(lo, hi);
        int i_begin = static_cast<int>(std::ceil((lo_ax - ax_origin) / grid.spacing - 1e-12));
        int i_end = static_cast<int>(std::floor((hi_ax - ax_origin) / grid.spacing + 1e-12));
        i_begin = std::max(i_begin, 0);
        i_end = std::min(i_end, n_major - 1);
        for (int i = i_begin; i <= i_end; ++i) {
            const double ax = ax_origin + grid.spacing * i;
            const double t = (ax - (x_major ? p.x : p.y)) / ax_d;
            const double minor = (x_major ? p.y + t * d.y : p.x + t * d.x);
            const double fm = (minor - (x_major ? grid.origin.y : grid.origin.x)) / grid.spacing;
            int j = static_cast<int>(std::floor(fm));
            if (j < -1 || j > n_minor - 1) continue;
            j = std::clamp(j, 0, n_minor - 2);
            const double w = std::clamp(fm - j, 0.0, 1.0);
            // Node index is iy * nx + ix.
            const int c0 = x_major ? j * grid.nx + i : i * grid.nx + j;
            const int c1 = x_major ? (j + 1) * grid.nx + i : i * grid.nx + (j + 1);
            if ((1.0 - w) > 0.0) cells.emplace_back(c0, step_len * (1.0 - w));
            if (w > 0.0) cells.emplace_back(c1, step_len * w);
        }
        if (valid_nodes) {
            std::erase_if(cells, [&](const std::pair<int, double>& c) {
                return !(*valid_nodes)[static_cast<std::size_t>(c.first)];
            });
        }
    });

    for (std::size_t i = 0; i < rows.size(); ++i)
        A.row_ptr[i + 1] = A.row_ptr[i] + rows[i].cells.size();
    A.cols.resize(A.row_ptr.back());
    A.vals.resize(A.row_ptr.back());
    parallel_for(rows.size(), [&](std::size_t i) {
        std::size_t k = A.row_ptr[i];
        for (const auto& [cell, len] : rows[i].cells) {
            A.cols[k] = cell;
            A.vals[k] = len;
            ++k;
        }
    });
    return A;
}

namespace {

RayMatrix transpose(const RayMatrix& A) {
    RayMatrix T;
    T.n_rows = A.n_cols;
    T.n_cols = A.n_rows;
    T.row_ptr.assign(static_cast<std::size_t>(A.n_cols) + 1, 0);
    for (int c : A.cols) ++T.row_ptr[static_cast<std::size_t>(c) + 1];
    for (std::size_t i = 1; i < T.row_ptr.size(); ++i) T.row_ptr[i] += T.row_ptr[i - 1];
    T.cols.resize(A.vals.size());
    T.vals.resize(A.vals.size());
    std::vector<std::size_t> cursor(T.row_ptr.begin(), T.row_ptr.end() - 1);
    for (int r = 0; r < A.n_rows; ++r)
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
            const std::size_t slot = cursor[static_cast<std::size_t>(A.cols[k])]++;
            T.cols[slot] = r;
            T.vals[slot] = A.vals[k];
        }
    return T;
}

void ritz_estimates(const std::vector<double>& alphas, const std::vector<double>& betas,
                    CglsReport& report) {
    const int k = static_cast<int>(alphas.size());
    if (k == 0) return;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        double diag = 1.0 / alphas[i];
        if (i > 0) diag += betas[i - 1] / alphas[i - 1];
        T(i, i) = diag;
        if (i + 1 < k) {
            const double off = std::sqrt(betas[i]) / alphas[i];
            T(i, i + 1) = off;
            T(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(T);
    const auto& ev = solver.eigenvalues();
    report.sigma_min_estimate = std::sqrt(std::max(0.0, ev(0)));
    report.sigma_max_estimate = std::sqrt(std::max(0.0, ev(k - 1)));
}

}  // namespace

std::vector<double> cgls_solve(const RayMatrix& A, std::span<const double> b,
                               const CglsOptions& options, CglsReport& report) {
    const std::size_t n = static_cast<std::size_t>(A.n_cols);
    const std::size_t m = static_cast<std::size_t>(A.n_rows);
    if (b.size() != m) raise(ErrorCode::InternalError, "rhs size mismatch");

    std::vector<double> x(n, 0.0);
    std::vector<double> r(b.begin(), b.end());
    const double b_norm = std::sqrt(deterministic_dot(r, r));
    report = CglsReport{};
    report.residual_history.push_back(b_norm);
    if (b_norm == 0.0) return x;

    const RayMatrix At = transpose(A);

    std::vector<double> s(n, 0.0), p(n, 0.0), q(m, 0.0);
    At.multiply(r, s);
    p = s;
    double gamma = deterministic_dot(s, s);

    std::vector<double> alphas, betas;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        A.multiply(p, q);
        const double qq = deterministic_dot(q, q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < m; ++i) r[i] -= alpha * q[i];
        At.multiply(r, s);
        const double gamma_next = deterministic_dot(s, s);
        const double beta = gamma_next / gamma;
        alphas.push_back(alpha);
        betas.push_back(beta);
        for (std::size_t i = 0; i < n; ++i) p[i] = s[i] + beta * p[i];
        gamma = gamma_next;

        const double res = std::sqrt(deterministic_dot(r, r));
        report.residual_history.push_back(res);
        report.iterations = iter + 1;

        if (res / b_norm < options.tolerance) break;
        const int w = options.stagnation_window;
        if (static_cast<int>(report.residual_history.size()) > w) {
            const double prev =
                report.residual_history[report.residual_history.size() - 1 - w];
            if (prev > 0.0 && (prev - res) / prev < options.stagnation_decrease)
                report.slow_convergence = true;
        }
    }
    ritz_estimates(alphas, betas, report);
    return x;
}

}  // namespace brt
