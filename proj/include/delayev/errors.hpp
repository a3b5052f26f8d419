#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace delayev {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problems: dimension mismatches, empty containers, bad shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the operation's domain, or a violated precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: bad catalog entries, violated declared bounds,
/// missing tail bounds, schema violations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Configurations the toolkit rejects by design (e.g. unbounded tau_star).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Non-finite values: overflow, NaN.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A growth or decay certificate is violated or misused.
class CertificateError : public Error {
public:
    using Error::Error;
};

/// A requested tolerance could not be met (quadrature budgets).
class ToleranceError : public Error {
public:
    using Error::Error;
};

/// An iteration failed to converge; carries the residual history.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what,
                              std::vector<double> residuals = {})
        : Error(what), residual_history(std::move(residuals)) {}

    std::vector<double> residual_history;
};

} // namespace delayev
