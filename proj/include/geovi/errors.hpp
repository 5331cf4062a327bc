#pragma once

#include <stdexcept>
#include <string>

namespace geovi {

// Root of all fatal library errors.  Recoverable conditions (non-converged
// solver, failed line search, dropped sample) are reported through result
// flags instead and never throw.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/size disagreement between operands.
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// Evaluation left the mathematical domain of a map (log of a non-positive
// value, Bernoulli rate outside (0,1), ...).  Deliberately not masked by
// clamping; callers that can recover (sample loops) catch this type.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A matrix required to be symmetric positive definite was not.
struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

// Dense materialization / dense-only paths refuse dimensions above the
// configured limit instead of silently thrashing.
struct DimensionTooLarge : Error {
    explicit DimensionTooLarge(const std::string& msg) : Error(msg) {}
};

// NaN or Inf encountered where a finite value is required.
struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& msg) : Error(msg) {}
};

// Grid construction or grid/operand incompatibility.
struct BadShape : Error {
    explicit BadShape(const std::string& msg) : Error(msg) {}
};

// Requested example name is not in the registry.
struct UnknownExample : Error {
    explicit UnknownExample(const std::string& msg) : Error(msg) {}
};

// A grid density could not be normalized (all mass underflowed or non-finite).
struct NonNormalizable : Error {
    explicit NonNormalizable(const std::string& msg) : Error(msg) {}
};

// Two grid densities that must share bounds and resolution do not.
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

// Configuration file / CLI usage errors (unknown keys, bad values).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace geovi
