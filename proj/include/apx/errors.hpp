#pragma once

#include <stdexcept>
#include <string>

namespace apx {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonConverged : Error { using Error::Error; };
struct SizeLimit : Error { using Error::Error; };
struct Unrepresentable : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct PoleAt : Error { using Error::Error; };
struct LogOfZero : Error { using Error::Error; };
struct OverlappingBlends : Error { using Error::Error; };
struct ProfileMismatch : Error { using Error::Error; };
struct AtSingularPoint : Error { using Error::Error; };
struct VerificationFailed : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct NotHolomorphic : Error { using Error::Error; };
struct CoverMismatch : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct GlueMismatch : Error { using Error::Error; };
struct InputError : Error { using Error::Error; };

/// Wraps an error from a named pipeline stage.
struct StageError : Error {
    std::string stage;
    StageError(const std::string& stage_, const std::string& what)
        : Error("[" + stage_ + "] " + what), stage(stage_) {}
};

} // namespace apx
