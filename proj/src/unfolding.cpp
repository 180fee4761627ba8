#include "brt/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "brt/errors.hpp"

namespace brt {

namespace {

/// Apply the reflection across the line through the origin at angle beta.
Vec2 reflect_about_axis(double beta, Vec2 v) {
    const double c = std::cos(2.0 * beta), s = std::sin(2.0 * beta);
    return {c * v.x + s * v.y, s * v.x - c * v.y};
}

}  // namespace

DihedralUnfolding DihedralUnfolding::create(ConeDomain source) {
    DihedralUnfolding u;
    u.source = std::move(source);
    const double alpha = u.source.alpha;
    const double m_real = kPi / alpha;
    const int m_round = static_cast<int>(std::lround(m_real));
    if (m_round >= 1 && std::abs(m_real - m_round) < 1e-9) {
        u.integer_case = true;
        u.m = m_round;
        u.copy_count = 2 * m_round;
        u.filler_start = 0.0;
        u.filler_width = 0.0;
        u.filler_radius = 0.0;
    } else {
        u.integer_case = false;
        u.m = 0;
        u.copy_count = static_cast<int>(std::ceil(m_real - 1e-12));
        u.copy_count = std::max(u.copy_count, 1);
        u.filler_start = u.copy_count * alpha;
        u.filler_width = std::max(0.0, kTwoPi - u.filler_start);
        u.filler_radius = 1.05 * u.source.max_h();
    }
    return u;
}

Vec2 DihedralUnfolding::section_point(int sector, Vec2 x) const {
    const double alpha = source.alpha;
    if (sector % 2 == 0) return rotate(x, sector * alpha);
    return reflect_about_axis((sector + 1) * alpha / 2.0, x);
}

Vec2 DihedralUnfolding::section_dir(int sector, Vec2 d) const { return section_point(sector, d); }

std::pair<int, Vec2> DihedralUnfolding::fold_point(Vec2 x) const {
    const double r = x.norm();
    if (r < source.tip_epsilon())
        raise(ErrorCode::OutsideUnfolding, "projection undefined at the apex");
    const double alpha = source.alpha;
    double theta = x.angle();
    if (!integer_case && theta > filler_start) {
        // Snap points that are numerically on the last edge back into range.
        if (theta - filler_start < 1e-12)
            theta = filler_start;
        else
            raise(ErrorCode::OutsideUnfolding, "point lies in the filler range");
    }
    int sector = static_cast<int>(std::floor(theta / alpha));
    sector = std::clamp(sector, 0, copy_count - 1);
    // The floor can land one sector off when theta sits on a boundary ray;
    // nudge to the neighbor whose fold lands inside [0, alpha].
    Vec2 folded = fold_dir(sector, x);
    const double fa = folded.angle();
    if (fa > alpha && fa < kTwoPi - 1e-9) {
        for (int cand : {sector - 1, sector + 1}) {
            if (cand < 0 || cand >= copy_count) continue;
            const Vec2 alt = fold_dir(cand, x);
            const double aa = alt.angle();
            if (aa <= alpha + 1e-12 || aa >= kTwoPi - 1e-9) {
                sector = cand;
                folded = alt;
                break;
            }
        }
    }
    return {sector, folded};
}

Vec2 DihedralUnfolding::fold_dir(int sector, Vec2 d) const {
    const double alpha = source.alpha;
    if (sector % 2 == 0) return rotate(d, -sector * alpha);
    return reflect_about_axis((sector + 1) * alpha / 2.0, d);
}

bool DihedralUnfolding::point_in_filler(Vec2 x) const {
    if (!has_filler()) return false;
    if (x.norm() > filler_radius) return false;
    const double theta = x.angle();
    return theta >= filler_start && theta <= kTwoPi;
}

bool DihedralUnfolding::line_hits_filler(const Line& line) const {
    if (!has_filler()) return false;
    // Support-function test against the convex wedge (width <= pi by
    // construction): the wedge spans [filler_start, 2 pi] with radius R.
    const auto support = [&](Vec2 w) {
        const double wa = w.angle();
        double best = 0.0;  // the apex contributes 0
        // Arc extreme: if the direction points into the wedge range, R.
        if (wa >= filler_start || wa <= 1e-15) best = filler_radius;
        // Wedge corner rays.
        best = std::max(best, filler_radius * std::max(0.0, w.dot(polar(1.0, filler_start))));
        best = std::max(best, filler_radius * std::max(0.0, w.dot(Vec2{1.0, 0.0})));
        return best;
    };
    const Vec2 n = line.normal();
    return -support(-n) <= line.offset && line.offset <= support(n);
}

std::string DihedralUnfolding::to_json() const {
    nlohmann::json j;
    j["alpha"] = source.alpha;
    j["copy_count"] = copy_count;
    if (integer_case) {
        j["m"] = m;
        j["filler"] = nullptr;
    } else {
        j["filler"] = {{"start", filler_start}, {"width", filler_width}, {"radius", filler_radius}};
    }
    j["h"] = source.h.registry_key();
    j["h_max"] = source.max_h();
    return j.dump();
}

namespace {

/// Identify the reflecting edge (0 or 1) of a cone vertex; vertices come
/// from the tracer so they sit on an edge to high accuracy.
int edge_of_vertex(const ConeDomain& dom, Vec2 v) {
    const double r = v.norm();
    const double d0 = std::abs(v.y);
    const double d1 = std::abs(polar(1.0, dom.alpha).cross(v));
    if (d0 <= d1) {
        if (d0 > 1e-6 * r) raise(ErrorCode::InternalError, "reflection vertex is not on an edge");
        return 0;
    }
    if (d1 > 1e-6 * r) raise(ErrorCode::InternalError, "reflection vertex is not on an edge");
    return 1;
}

int sector_step(int sector, int edge) {
    if (sector % 2 == 0) return edge == 0 ? -1 : +1;
    return edge == 0 ? +1 : -1;
}

}  // namespace

UnfoldedRay unfold_broken_ray(const DihedralUnfolding& u, const BrokenRay& ray,
                              std::optional<int> initial_sector) {
    if (ray.vertices.size() < 2)
        raise(ErrorCode::InternalError, "cannot unfold a ray with fewer than 2 vertices");
    const int K = u.copy_count;
    const int reflections = ray.reflection_count();

    int start_sector;
    if (initial_sector) {
        start_sector = *initial_sector;
        if (start_sector < 0 || start_sector >= K)
            raise(ErrorCode::OutsideUnfolding, "initial sector out of range");
    } else if (u.integer_case || reflections == 0) {
        start_sector = 0;
    } else {
        // Canonical choice: counterclockwise sweeps start at sector 0; a
        // clockwise sweep starts high enough that every copy stays in range.
        const int first_edge = edge_of_vertex(u.source, ray.vertices[1]);
        start_sector = first_edge == 1 ? 0 : reflections;
        if (start_sector >= K)
            raise(ErrorCode::OutsideUnfolding, "ray needs more copies than the unfolding has");
    }

    UnfoldedRay out;
    out.initial_sector = start_sector;
    out.vertices.reserve(ray.vertices.size());
    int sector = start_sector;
    out.vertices.push_back(u.section_point(sector, ray.vertices.front()));
    for (std::size_t j = 1; j + 1 < ray.vertices.size(); ++j) {
        const Vec2 v = ray.vertices[j];
        out.vertices.push_back(u.section_point(sector, v));
        const int edge = edge_of_vertex(u.source, v);
        sector += sector_step(sector, edge);
        if (u.integer_case)
            sector = (sector % K + K) % K;
        else if (sector < 0 || sector >= K)
            raise(ErrorCode::OutsideUnfolding, "ray leaves the unfolded sector range");
    }
    out.vertices.push_back(u.section_point(sector, ray.vertices.back()));

    out.length = polyline_length(out.vertices);
    const Vec2 a = out.vertices.front();
    const Vec2 b = out.vertices.back();
    const Vec2 dir = (b - a).normalized();
    double worst = 0.0;
    for (const Vec2& w : out.vertices) worst = std::max(worst, std::abs(dir.cross(w - a)));
    out.collinearity_residual = worst / std::max(out.length, 1e-300);
    out.line = Line::through(a, dir);
    return out;
}

namespace {

/// First parameter at which the line enters the unfolded region, or nullopt.
std::optional<double> first_domain_entry(const DihedralUnfolding& u, const Line& line) {
    const ConeDomain& dom = u.source;
    if (dom.h.kind == BoundaryRadius::Kind::Constant && u.integer_case) {
        const double h = dom.h.base;
        if (std::abs(line.offset) >= h) return std::nullopt;
        return -std::sqrt(h * h - line.offset * line.offset);
    }
    // General case: march across the bounding circle and bisect the first
    // inside/outside transition.
    const double R = dom.max_h();
    if (std::abs(line.offset) >= R) return std::nullopt;
    const double half_chord = std::sqrt(R * R - line.offset * line.offset);
    const auto inside = [&](double t) {
        const Vec2 x = line.point_at(t);
        const double theta = x.angle();
        if (!u.integer_case && theta > u.filler_start) return false;
        return dom.radial_residual(x) < 0.0;
    };
    const double step = dom.min_h() / 256.0;
    double t = -half_chord;
    if (inside(t)) return t;  // degenerate: starts inside (cannot happen on the circle)
    while (t < half_chord) {
        const double next = std::min(t + step, half_chord);
        if (inside(next)) {
            double lo = t, hi = next;
            for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
                const double mid = 0.5 * (lo + hi);
                (inside(mid) ? hi : lo) = mid;
            }
            return hi;  // first point reported inside
        }
        if (next >= half_chord) break;
        t = next;
    }
    return std::nullopt;
}

}  // namespace

FoldedLine fold_line(const DihedralUnfolding& u, const Line& line, const TraceOptions& opts) {
    const double eps_tip = u.source.tip_epsilon();
    if (std::abs(line.offset) < eps_tip)
        raise(ErrorCode::ApexLine, "line passes through the apex");
    if (u.line_hits_filler(line)) raise(ErrorCode::FillerConeHit, "line crosses the filler cone");

    const auto t_enter = first_domain_entry(u, line);
    if (!t_enter) raise(ErrorCode::EmptyIntersection, "line misses the unfolded domain");

    const Vec2 entry = line.point_at(*t_enter);
    auto [sector, start] = u.fold_point(entry);
    const Vec2 dir = u.fold_dir(sector, line.direction());
    FoldedLine out;
    out.entry_sector = sector;
    out.ray = trace_broken_ray(u.source, start, dir, opts);
    return out;
}

ScalarField2D fold_field(const DihedralUnfolding& u, const ScalarField2D& f) {
    const double R = u.source.max_h();
    const DihedralUnfolding unfolding = u;  // value copy keeps the field self-contained
    const ScalarField2D source = f;
    auto eval = [unfolding, source](Vec2 x) -> double {
        const double r = x.norm();
        if (r >= unfolding.source.max_h()) return 0.0;
        const double alpha = unfolding.source.alpha;
        double theta = x.angle();
        if (!unfolding.integer_case && theta > unfolding.filler_start) return 0.0;
        int sector = std::clamp(static_cast<int>(std::floor(theta / alpha)), 0,
                                unfolding.copy_count - 1);
        const Vec2 folded = unfolding.fold_dir(sector, x);
        return source(folded);
    };
    return ScalarField2D::analytic(eval, BoundingBox::centered({0.0, 0.0}, R));
}

// --- Cube folding -------------------------------------------------------------

double cube_fold_scalar(double u) {
    double v = std::fmod(u, 2.0);
    if (v < 0.0) v += 2.0;
    return 1.0 - std::abs(1.0 - v);
}

std::array<double, 3> cube_fold_point(int n, const std::array<double, 3>& x) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) out[i] = cube_fold_scalar(x[i]);
    return out;
}

BrokenRay CubeOrbit::to_broken_ray() const {
    if (n != 2) raise(ErrorCode::InternalError, "planar view needs n == 2");
    BrokenRay ray;
    ray.domain_tag = "cube";
    ray.closed = true;
    for (const auto& v : vertices) ray.vertices.push_back({v[0], v[1]});
    ray.total_length = total_length;
    return ray;
}

CubeOrbit torus_geodesic_to_cube_orbit(int n, const std::array<int, 3>& k,
                                       const std::array<double, 3>& x0) {
    if (n != 2 && n != 3) raise(ErrorCode::InvalidOrbit, "cube dimension must be 2 or 3");
    double k_norm2 = 0.0;
    for (int i = 0; i < n; ++i) k_norm2 += double(k[i]) * k[i];
    if (k_norm2 == 0.0) raise(ErrorCode::InvalidOrbit, "k must be a nonzero integer vector");

    constexpr double eps = 1e-9;
    for (int i = 0; i < n; ++i) {
        if (k[i] != 0) continue;
        const double c = cube_fold_scalar(x0[i]);
        if (c < eps || c > 1.0 - eps)
            raise(ErrorCode::DegenerateOrbit, "orbit runs inside a cube face");
    }

    struct Event {
        double t;
        int axis;
    };
    std::vector<Event> events;
    for (int i = 0; i < n; ++i) {
        if (k[i] == 0) continue;
        // x0_i + 2 t k_i integer at t = (j - x0_i) / (2 k_i); 2|k_i| hits per period.
        const int hits = 2 * std::abs(k[i]);
        const double speed = 2.0 * k[i];
        const int j0 = k[i] > 0 ? static_cast<int>(std::ceil(x0[i] - 1e-12))
                                : static_cast<int>(std::floor(x0[i] + 1e-12));
        for (int step = 0; step < hits; ++step) {
            const int j = k[i] > 0 ? j0 + step : j0 - step;
            const double t = (j - x0[i]) / speed;
            if (t >= -1e-12 && t < 1.0 - 1e-12) events.push_back({std::max(t, 0.0), i});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.t < b.t || (a.t == b.t && a.axis < b.axis);
    });
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t - events[i - 1].t < 1e-12 && events[i].axis != events[i - 1].axis)
            raise(ErrorCode::DegenerateOrbit, "orbit passes through a cube edge or corner");

    const auto at = [&](double t) {
        std::array<double, 3> p{0.0, 0.0, 0.0};
        for (int i = 0; i < n; ++i) p[i] = x0[i] + 2.0 * t * k[i];
        return cube_fold_point(n, p);
    };

    CubeOrbit orbit;
    orbit.n = n;
    orbit.vertices.push_back(at(0.0));
    for (const Event& e : events) {
        if (e.t <= 1e-12) continue;  // the start point doubles as this vertex
        orbit.vertices.push_back(at(e.t));
        orbit.reflection_axes.push_back(e.axis);
    }
    orbit.vertices.push_back(orbit.vertices.front());

    double length = 0.0;
    for (std::size_t i = 1; i < orbit.vertices.size(); ++i) {
        double seg2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double d = orbit.vertices[i][a] - orbit.vertices[i - 1][a];
            seg2 += d * d;
        }
        length += std::sqrt(seg2);
    }
    orbit.total_length = length;
    return orbit;
}

// --- Octant folding ------------------------------------------------------------

Vec3 octant_fold_point(Vec3 x) { return {std::abs(x.x), std::abs(x.y), std::abs(x.z)}; }

GreatCircle::GreatCircle(Vec3 omega) : normal(omega.normalized()) {
    // Deterministic frame: seed with the coordinate axis least aligned with
    // the normal (ties break toward x, then y).
    const double ax = std::abs(normal.x), ay = std::abs(normal.y), az = std::abs(normal.z);
    Vec3 seed{1.0, 0.0, 0.0};
    if (ay < ax || az < ax) seed = (ay <= az) ? Vec3{0.0, 1.0, 0.0} : Vec3{0.0, 0.0, 1.0};
    e1 = (seed - normal * seed.dot(normal)).normalized();
    e2 = normal.cross(e1);
}

SphereField octant_unfold_field(const SphereField& octant_field) {
    SphereField out;
    const SphereField inner = octant_field;
    out.eval = [inner](Vec3 x) { return inner(octant_fold_point(x)); };
    return out;
}

}  // namespace brt
