#include "brt/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "brt/errors.hpp"

namespace brt {

int QuadratureSpec::interval_count(double length) const {
    const double want = nodes_per_unit_length * std::max(length, 0.0);
    int n = static_cast<int>(std::ceil(want));
    n = std::max(n, 2);
    if (n % 2 == 1) ++n;
    return n;
}

ScalarField2D ScalarField2D::grid(Vec2 origin, double spacing, int nx, int ny,
                                  std::vector<double> values) {
    if (nx < 2 || ny < 2) raise(ErrorCode::FieldError, "grid needs at least 2x2 samples");
    if (spacing <= 0.0) raise(ErrorCode::FieldError, "grid spacing must be positive");
    if (values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        raise(ErrorCode::FieldError, "grid value count does not match nx*ny");
    for (double v : values)
        if (!std::isfinite(v)) raise(ErrorCode::FieldError, "grid contains non-finite value");

    ScalarField2D f;
    f.kind_ = FieldKind::Grid;
    f.origin_ = origin;
    f.spacing_ = spacing;
    f.nx_ = nx;
    f.ny_ = ny;
    f.values_ = std::move(values);
    f.support_ = BoundingBox{origin, origin + Vec2{spacing * (nx - 1), spacing * (ny - 1)}};
    return f;
}

ScalarField2D ScalarField2D::analytic(std::function<double(Vec2)> eval, BoundingBox support) {
    ScalarField2D f;
    f.kind_ = FieldKind::Analytic;
    f.eval_ = std::move(eval);
    f.support_ = support;
    return f;
}

double ScalarField2D::operator()(Vec2 p) const {
    if (!support_.contains(p)) return 0.0;
    if (kind_ == FieldKind::Grid) return grid_value(p);
    return eval_(p);
}

double ScalarField2D::grid_value(Vec2 p) const {
    const double fx = (p.x - origin_.x) / spacing_;
    const double fy = (p.y - origin_.y) / spacing_;
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    ix = std::clamp(ix, 0, nx_ - 2);
    iy = std::clamp(iy, 0, ny_ - 2);
    const double ax = std::clamp(fx - ix, 0.0, 1.0);
    const double ay = std::clamp(fy - iy, 0.0, 1.0);
    const auto at = [&](int jx, int jy) {
        return values_[static_cast<std::size_t>(jy) * nx_ + jx];
    };
    return (1.0 - ax) * (1.0 - ay) * at(ix, iy) + ax * (1.0 - ay) * at(ix + 1, iy) +
           (1.0 - ax) * ay * at(ix, iy + 1) + ax * ay * at(ix + 1, iy + 1);
}

int ScalarField2D::nx() const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "not a grid field");
    return nx_;
}
int ScalarField2D::ny() const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "not a grid field");
    return ny_;
}
double ScalarField2D::spacing() const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "not a grid field");
    return spacing_;
}
Vec2 ScalarField2D::origin() const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "not a grid field");
    return origin_;
}
const std::vector<double>& ScalarField2D::values() const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "not a grid field");
    return values_;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void ScalarField2D::save_csv(const std::string& path) const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "only grid fields serialize to CSV");
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << "nx,ny,ox,oy,spacing\n";
    out << nx_ << ',' << ny_ << ',' << format_double(origin_.x) << ',' << format_double(origin_.y)
        << ',' << format_double(spacing_) << '\n';
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            if (i) out << ',';
            out << format_double(values_[static_cast<std::size_t>(j) * nx_ + i]);
        }
        out << '\n';
    }
    if (!out) raise(ErrorCode::IoError, "write failed for " + path);
}

ScalarField2D ScalarField2D::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::string header;
    std::getline(in, header);
    if (header != "nx,ny,ox,oy,spacing")
        raise(ErrorCode::IoError, "bad grid CSV header in " + path);
    std::string meta;
    std::getline(in, meta);
    std::replace(meta.begin(), meta.end(), ',', ' ');
    std::istringstream ms(meta);
    int nx = 0, ny = 0;
    double ox = 0, oy = 0, spacing = 0;
    if (!(ms >> nx >> ny >> ox >> oy >> spacing))
        raise(ErrorCode::IoError, "bad grid CSV metadata in " + path);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(nx) * ny);
    std::string row;
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        std::replace(row.begin(), row.end(), ',', ' ');
        std::istringstream rs(row);
        double v;
        while (rs >> v) values.push_back(v);
    }
    return grid({ox, oy}, spacing, nx, ny, std::move(values));
}

void ScalarField2D::save_pgm(const std::string& path) const {
    if (kind_ != FieldKind::Grid) raise(ErrorCode::FieldError, "only grid fields serialize to PGM");
    double lo = values_[0], hi = values_[0];
    for (double v : values_) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << "P5\n" << nx_ << ' ' << ny_ << "\n65535\n";
    // Rows top-to-bottom: the last grid row (largest y) comes first.
    std::vector<unsigned char> row(static_cast<std::size_t>(nx_) * 2);
    for (int j = ny_ - 1; j >= 0; --j) {
        for (int i = 0; i < nx_; ++i) {
            const double v = values_[static_cast<std::size_t>(j) * nx_ + i];
            const auto q = static_cast<std::uint16_t>(
                std::lround(std::clamp((v - lo) / span, 0.0, 1.0) * 65535.0));
            row[2 * i] = static_cast<unsigned char>(q >> 8);
            row[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) raise(ErrorCode::IoError, "write failed for " + path);

    nlohmann::json side;
    side["min"] = lo;
    side["max"] = hi;
    side["nx"] = nx_;
    side["ny"] = ny_;
    side["origin"] = {origin_.x, origin_.y};
    side["spacing"] = spacing_;
    std::ofstream sj(path + ".json");
    if (!sj) raise(ErrorCode::IoError, "cannot open " + path + ".json for writing");
    sj << side.dump(2) << '\n';
}

ScalarField2D ScalarField2D::load_pgm(const std::string& path) {
    std::ifstream sj(path + ".json");
    if (!sj) raise(ErrorCode::IoError, "missing sidecar " + path + ".json");
    nlohmann::json side = nlohmann::json::parse(sj, nullptr, false);
    if (side.is_discarded()) raise(ErrorCode::IoError, "bad sidecar JSON for " + path);
    const double lo = side.at("min").get<double>();
    const double hi = side.at("max").get<double>();
    const int nx = side.at("nx").get<int>();
    const int ny = side.at("ny").get<int>();
    const double ox = side.at("origin")[0].get<double>();
    const double oy = side.at("origin")[1].get<double>();
    const double spacing = side.at("spacing").get<double>();

    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w != nx || h != ny || maxval != 65535)
        raise(ErrorCode::IoError, "unsupported PGM layout in " + path);
    in.get();  // single whitespace after maxval
    std::vector<double> values(static_cast<std::size_t>(nx) * ny, 0.0);
    std::vector<unsigned char> row(static_cast<std::size_t>(nx) * 2);
    const double span = hi > lo ? hi - lo : 1.0;
    for (int j = ny - 1; j >= 0; --j) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in) raise(ErrorCode::IoError, "truncated PGM " + path);
        for (int i = 0; i < nx; ++i) {
            const int q = (row[2 * i] << 8) | row[2 * i + 1];
            values[static_cast<std::size_t>(j) * nx + i] = lo + span * (q / 65535.0);
        }
    }
    return grid({ox, oy}, spacing, nx, ny, std::move(values));
}

RadialProfile::RadialProfile(std::function<double(double)> g, bool compact_support, double margin)
    : g_(std::move(g)), compact_(compact_support) {
    if (compact_) {
        // Verify the declared support by sampling near both endpoints.
        for (int i = 0; i <= 32; ++i) {
            const double t = margin * i / 32.0;
            if (std::abs(g_(t)) > 1e-12 || std::abs(g_(1.0 - t)) > 1e-12)
                raise(ErrorCode::FieldError, "profile not supported inside the declared margin");
        }
    }
}

double RadialProfile::mean(int intervals) const {
    return simpson_1d([this](double t) { return g_(t); }, 0.0, 1.0, intervals);
}

double simpson_1d(const std::function<double(double)>& f, double a, double b, int intervals) {
    if (intervals < 2) intervals = 2;
    if (intervals % 2 == 1) ++intervals;
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double integrate_segment(const ScalarField2D& field, Vec2 p0, Vec2 p1, AttenuationWeight weight,
                         const QuadratureSpec& quad) {
    const Vec2 delta = p1 - p0;
    const double length = delta.norm();
    if (length <= 0.0) raise(ErrorCode::QuadratureError, "degenerate segment: p0 == p1");
    const Vec2 u = delta * (1.0 / length);
    const int n = quad.interval_count(length);
    const double h = length / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = h * i;
        double v = field(p0 + u * t);
        if (!std::isfinite(v))
            raise(ErrorCode::QuadratureError, "non-finite field value on segment");
        if (weight.h != 0.0) v *= std::exp(weight.h * (t + weight.offset));
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += c * v;
    }
    return sum * h / 3.0;
}

}  // namespace brt
