#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vmfe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector/matrix dimensions that do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A data point coincides with the location parameter, so its direction is undefined.
class DegeneratePointError : public DomainError {
public:
    DegeneratePointError(const std::string& what, std::size_t row)
        : DomainError(what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Whitened directions with mean resultant length at (or numerically at) one.
class DegenerateDataError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The radial law has no finite moment of the requested order (e.g. Cauchy).
class NoMomentError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A closed-form update whose denominator vanished.
class StalledStepError : public Error {
public:
    using Error::Error;
};

/// The optimizer produced a non-finite likelihood.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input document or CSV. The message carries the field path or line number.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace vmfe
