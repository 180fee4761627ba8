#include "brt/geom.hpp"

#include <algorithm>
#include <utility>

#include "brt/errors.hpp"

namespace brt {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::TangentialHit: return "TangentialHit";
        case ErrorCode::TipHit: return "TipHit";
        case ErrorCode::MaxReflectionsExceeded: return "MaxReflectionsExceeded";
        case ErrorCode::InvalidOrbit: return "InvalidOrbit";
        case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
        case ErrorCode::ApexLine: return "ApexLine";
        case ErrorCode::FillerConeHit: return "FillerConeHit";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::OutsideUnfolding: return "OutsideUnfolding";
        case ErrorCode::QuadratureError: return "QuadratureError";
        case ErrorCode::FieldError: return "FieldError";
        case ErrorCode::IncompleteSinogram: return "IncompleteSinogram";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::NonEvenData: return "NonEvenData";
        case ErrorCode::InvalidNullProfile: return "InvalidNullProfile";
        case ErrorCode::UnderdeterminedProbe: return "UnderdeterminedProbe";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "UnknownError";
}

bool clip_line_to_box(const Line& line, const BoundingBox& box, double& t0, double& t1) {
    // Liang-Barsky against the slab pair of each axis.
    const Vec2 p = line.normal() * line.offset;
    const Vec2 d = line.direction();
    double lo = -1e300, hi = 1e300;
    const double px[2] = {p.x, p.y};
    const double dx[2] = {d.x, d.y};
    const double blo[2] = {box.lo.x, box.lo.y};
    const double bhi[2] = {box.hi.x, box.hi.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dx[axis]) < 1e-300) {
            if (px[axis] < blo[axis] || px[axis] > bhi[axis]) return false;
            continue;
        }
        double ta = (blo[axis] - px[axis]) / dx[axis];
        double tb = (bhi[axis] - px[axis]) / dx[axis];
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
    }
    if (lo > hi) return false;
    t0 = lo;
    t1 = hi;
    return true;
}

}  // namespace brt
