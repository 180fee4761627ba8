#pragma once

#include <stdexcept>
#include <string>

namespace brt {

enum class ErrorCode {
    TangentialHit,
    TipHit,
    MaxReflectionsExceeded,
    InvalidOrbit,
    DegenerateOrbit,
    ApexLine,
    FillerConeHit,
    EmptyIntersection,
    OutsideUnfolding,
    QuadratureError,
    FieldError,
    IncompleteSinogram,
    DegenerateGeometry,
    NonEvenData,
    InvalidNullProfile,
    UnderdeterminedProbe,
    ConfigError,
    IoError,
    InternalError,
};

const char* error_name(ErrorCode code);

/// Single exception type for the library; callers that need to branch on a
/// failure mode test .code (sinogram assembly does this per cell).
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace brt
