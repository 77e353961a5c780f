#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rectlat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the admissible domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two operands do not satisfy a structural precondition (e.g. series orders differ).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The direct lattice sum cannot be used as an oracle for this potential.
class UnsupportedOracle : public DomainError {
public:
    using DomainError::DomainError;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A root was requested on an interval without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// The aspect-ratio search found neither an interior nor a boundary minimum.
class SearchFailure : public Error {
public:
    using Error::Error;
};

/// A transition could not be classified (e.g. no energy barrier where one was expected).
class ClassificationError : public Error {
public:
    using Error::Error;
};

/// An iterative solver ran out of iterations or left its domain.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::vector<std::string> trace = {})
        : Error(what), trace_(std::move(trace)) {}

    [[nodiscard]] const std::vector<std::string>& trace() const noexcept { return trace_; }

private:
    std::vector<std::string> trace_;
};

} // namespace rectlat
