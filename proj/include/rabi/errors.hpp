#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

/// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too much population has escaped past the Fock cutoff.
struct LeakError : Error {
    using Error::Error;
};

/// An operator expected to be Hermitian is not, within tolerance.
struct NotHermitianError : Error {
    using Error::Error;
};

/// Conditioning on a measurement outcome whose probability is ~0.
struct ZeroProbabilityError : Error {
    using Error::Error;
};

/// A check that only makes sense in a well-separated regime was
/// requested outside of it.
struct RegimeError : Error {
    using Error::Error;
};

/// Quadrature grid does not cover the support of the state.
struct GridTooSmallError : Error {
    using Error::Error;
};

/// A numerical estimate failed its internal resolution self-check.
struct UnstableEstimateError : Error {
    using Error::Error;
};

/// Fixed-step master-equation integration failed to keep the trace
/// within tolerance even after the maximum number of step halvings.
struct IntegratorDivergedError : Error {
    using Error::Error;
};

/// Operands with incompatible dimensions.
struct DimensionError : Error {
    using Error::Error;
};

/// Argument required to be positive was not.
struct NonPositiveError : Error {
    using Error::Error;
};

/// Invalid run configuration (CLI / config file).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rabi
