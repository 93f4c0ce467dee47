#pragma once

#include <stdexcept>
#include <string>

namespace hprbm {

// Base class for everything thrown by this library. The CLI maps the
// subcategories onto exit codes, so new error types should derive from
// one of the three groups below rather than from Error directly.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- invalid model inputs ---------------------------------------------
struct ModelError : Error {
    using Error::Error;
};
struct NotPositiveDefinite : ModelError {
    using ModelError::ModelError;
};
struct NotRecurrent : ModelError {
    using ModelError::ModelError;
};
struct NegativeHeight : ModelError {
    using ModelError::ModelError;
};

// --- numerical failures ------------------------------------------------
struct NumericalError : Error {
    using Error::Error;
};
struct UnwrapFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct NormalizationMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct WrongHalfPlane : NumericalError {
    using NumericalError::NumericalError;
};
struct OnRealAxis : NumericalError {
    using NumericalError::NumericalError;
};
struct KernelZero : NumericalError {
    using NumericalError::NumericalError;
};
struct DomainMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct OriginSingular : NumericalError {
    using NumericalError::NumericalError;
};
struct InsufficientRange : NumericalError {
    using NumericalError::NumericalError;
};
struct GridMismatch : NumericalError {
    using NumericalError::NumericalError;
};

// --- I/O ----------------------------------------------------------------
struct IoError : Error {
    using Error::Error;
};

} // namespace hprbm
