#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>

#include "brt/errors.hpp"
#include "brt/inversion.hpp"
#include "brt/parallel.hpp"
#include "brt/unfolding.hpp"

namespace brt {

namespace {

using Ivec = std::array<int, 3>;
using Dvec = std::array<double, 3>;

// Generic sampling-line anchor; keeps offset families away from cube faces,
// edges, and corners for every band in use.
constexpr Dvec kAnchor{0.3183098861837907, 0.2718281828459045, 0.1414213562373095};

int ivec_gcd(const Ivec& v, int n) {
    int g = 0;
    for (int i = 0; i < n; ++i) g = std::gcd(g, std::abs(v[i]));
    return g;
}

double ivec_norm2(const Ivec& v, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += double(v[i]) * v[i];
    return s;
}

}  // namespace

std::complex<double> FourierTable::at(const Ivec& m) const {
    auto it = coeffs.find(m);
    return it == coeffs.end() ? std::complex<double>{0.0, 0.0} : it->second;
}

double FourierTable::evaluate(const Dvec& x) const {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [m, c] : coeffs) {
        double phase = 0.0;
        for (int i = 0; i < n; ++i) phase += m[i] * x[i];
        acc += c * std::polar(1.0, kPi * phase);
    }
    return acc.real();
}

double FourierTable::conjugate_symmetry_residual() const {
    double worst = 0.0;
    for (const auto& [m, c] : coeffs) {
        Ivec neg = m;
        for (int i = 0; i < n; ++i) neg[i] = -m[i];
        worst = std::max(worst, std::abs(c - std::conj(at(neg))));
    }
    return worst;
}

double FourierTable::fold_symmetry_residual() const {
    double worst = 0.0;
    for (const auto& [m, c] : coeffs)
        for (int axis = 0; axis < n; ++axis) {
            Ivec flip = m;
            flip[axis] = -m[axis];
            worst = std::max(worst, std::abs(c - at(flip)));
        }
    return worst;
}

namespace {

/// True when some in-band frequency other than a multiple of d is also
/// orthogonal to k; those frequencies would alias into the offset-family
/// DFT bins.
bool k_has_in_band_alias(const Ivec& k, const Ivec& d, int band) {
    Ivec m{0, 0, 0};
    for (m[0] = -band; m[0] <= band; ++m[0])
        for (m[1] = -band; m[1] <= band; ++m[1])
            for (m[2] = -band; m[2] <= band; ++m[2]) {
                if (m[0] == 0 && m[1] == 0 && m[2] == 0) continue;
                if (m[0] * k[0] + m[1] * k[1] + m[2] * k[2] != 0) continue;
                // Multiples of d are the frequencies the family is meant to carry.
                const long long c01 = (long long)m[0] * d[1] - (long long)m[1] * d[0];
                const long long c02 = (long long)m[0] * d[2] - (long long)m[2] * d[0];
                const long long c12 = (long long)m[1] * d[2] - (long long)m[2] * d[1];
                if (c01 != 0 || c02 != 0 || c12 != 0) return true;
            }
    return false;
}

}  // namespace

std::array<int, 3> perpendicular_primitive(int n, const Ivec& m, int band) {
    const int g = ivec_gcd(m, n);
    if (g == 0) raise(ErrorCode::InternalError, "perpendicular of the zero vector");
    Ivec m0{0, 0, 0};
    for (int i = 0; i < n; ++i) m0[i] = m[i] / g;

    if (n == 2) return {-m0[1], m0[0], 0};

    // n == 3: scan boxes of growing size for the minimal-norm primitive
    // solution of k.m = 0; lexicographic order breaks ties. With a band
    // constraint, candidates whose orthogonal plane carries other in-band
    // frequencies are skipped.
    int limit = 1;
    for (int i = 0; i < 3; ++i) limit = std::max(limit, std::abs(m0[i]));
    limit = 2 * limit + 2;
    const int hard_cap = std::max(limit, 8 * (band + 1) * limit);
    while (limit <= hard_cap) {
        Ivec best{0, 0, 0};
        double best_norm = 1e300;
        for (int a = -limit; a <= limit; ++a)
            for (int b = -limit; b <= limit; ++b)
                for (int c = -limit; c <= limit; ++c) {
                    if (a == 0 && b == 0 && c == 0) continue;
                    if (a * m0[0] + b * m0[1] + c * m0[2] != 0) continue;
                    const Ivec k{a, b, c};
                    if (ivec_gcd(k, 3) != 1) continue;
                    const double norm = ivec_norm2(k, 3);
                    if (norm >= best_norm - 1e-12) continue;
                    if (band > 0 && k_has_in_band_alias(k, m0, band)) continue;
                    best_norm = norm;
                    best = k;
                }
        if (best_norm < 1e300) return best;
        limit *= 2;
    }
    raise(ErrorCode::InternalError, "no alias-free perpendicular found");
}

FourierTable torus_fourier_inversion(int n, const TorusData& data, int band,
                                     std::vector<TorusSample>* record) {
    if (n != 2 && n != 3) raise(ErrorCode::InternalError, "torus dimension must be 2 or 3");
    if (band < 0) raise(ErrorCode::InternalError, "band must be nonnegative");

    FourierTable table;
    table.n = n;
    table.band = band;

    const int N = 2 * band + 1;

    // Enumerate primitive directions up to sign (the DFT of one family
    // recovers every multiple j*m0, j in [-band, band], at once).
    std::set<Ivec> directions;
    const auto canonical = [&](Ivec v) {
        for (int i = 0; i < n; ++i) {
            if (v[i] > 0) break;
            if (v[i] < 0) {
                for (int j = 0; j < n; ++j) v[j] = -v[j];
                break;
            }
        }
        return v;
    };
    const int lo = -band, hi = band;
    Ivec m{0, 0, 0};
    for (m[0] = lo; m[0] <= hi; ++m[0])
        for (m[1] = lo; m[1] <= hi; ++m[1])
            for (m[2] = (n == 3 ? lo : 0); m[2] <= (n == 3 ? hi : 0); ++m[2]) {
                const int g = ivec_gcd(m, n);
                if (g == 0) continue;
                Ivec m0{0, 0, 0};
                for (int i = 0; i < n; ++i) m0[i] = m[i] / g;
                directions.insert(canonical(m0));
            }

    // Lay out every sample up front and fill the values in parallel (each
    // orbit integral is pure); the result and the recording order do not
    // depend on the thread count.
    const std::vector<Ivec> direction_list(directions.begin(), directions.end());
    std::vector<Ivec> ks(direction_list.size());
    parallel_for(direction_list.size(),
                 [&](std::size_t i) { ks[i] = perpendicular_primitive(n, direction_list[i], band); });

    std::vector<TorusSample> all_samples(direction_list.size() * N);
    parallel_for(all_samples.size(), [&](std::size_t idx) {
        const std::size_t di = idx / N;
        const int nu = static_cast<int>(idx % N);
        const Ivec& d = direction_list[di];
        const double d_norm2 = ivec_norm2(d, n);
        Dvec x0 = kAnchor;
        for (int i = 0; i < n; ++i) x0[i] += (2.0 * nu / N) * d[i] / d_norm2;
        all_samples[idx] = {ks[di], x0, data(ks[di], x0)};
    });
    if (record) record->insert(record->end(), all_samples.begin(), all_samples.end());

    bool have_c0 = false;
    for (std::size_t di = 0; di < direction_list.size(); ++di) {
        const Ivec& d = direction_list[di];
        const Ivec& k = ks[di];
        const double k_len = std::sqrt(ivec_norm2(k, n));

        std::vector<double> samples(N);
        for (int nu = 0; nu < N; ++nu)
            samples[nu] = all_samples[di * N + nu].value / (2.0 * k_len);

        double anchor_phase = 0.0;
        for (int i = 0; i < n; ++i) anchor_phase += d[i] * kAnchor[i];

        const int j_cap = band;  // j with |j d|_inf <= band is a subset
        for (int j = -j_cap; j <= j_cap; ++j) {
            bool in_band = true;
            for (int i = 0; i < n; ++i)
                if (std::abs(j * d[i]) > band) in_band = false;
            if (!in_band) continue;
            std::complex<double> hat{0.0, 0.0};
            for (int nu = 0; nu < N; ++nu)
                hat += samples[nu] * std::polar(1.0, -kTwoPi * j * nu / N);
            hat /= N;
            const std::complex<double> c = hat * std::polar(1.0, -kPi * j * anchor_phase);
            if (j == 0) {
                if (!have_c0) {
                    table.coeffs[{0, 0, 0}] = c;
                    have_c0 = true;
                }
                continue;
            }
            Ivec freq{0, 0, 0};
            for (int i = 0; i < n; ++i) freq[i] = j * d[i];
            table.coeffs[freq] = c;
        }
    }
    return table;
}

CubeReconstruction reconstruct_cube_periodic(int n, const CubeOrbitData& data, int band) {
    const TorusData torus_data = [n, &data](const Ivec& k, const Dvec& x0) {
        return data(torus_geodesic_to_cube_orbit(n, k, x0));
    };
    CubeReconstruction out;
    out.table = torus_fourier_inversion(n, torus_data, band, &out.samples);
    const FourierTable table = out.table;
    out.field = [table](const Dvec& x) { return table.evaluate(x); };
    return out;
}

}  // namespace brt
