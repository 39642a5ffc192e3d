#pragma once

#include <stdexcept>
#include <string>

namespace mml {

enum class ErrorKind {
    TriangleViolation,
    NegativeWeight,
    NotNormalized,
    BadShape,
    HostMismatch,
    TooLarge,
    ArityMismatch,
    BadArgument,
    NotIncreasing,
    CapExceeded,
    MetricViolation,
    NotLipschitz,
    BadAlpha,
    BadKappa,
    NotRational,
    TargetTooLarge,
    NotTriangleTriplet,
    WitnessInvalid,
    BadSpec,
    InconsistentArity,
    Io,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace mml
