#pragma once

#include <stdexcept>
#include <string>

namespace qrbf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (negative radius, bad index, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dimensions of two operands do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Matrix failed a positive-definiteness requirement. `value` carries the
/// offending pivot or eigenvalue and `index` its position.
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& what, double value, long index)
        : Error(what), value_(value), index_(index) {}
    [[nodiscard]] double value() const { return value_; }
    [[nodiscard]] long index() const { return index_; }

private:
    double value_;
    long index_;
};

/// A configured size cap (m*N^d, clock bits, ...) would be exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Phase estimation would alias eigenvalues past the top of the clock grid.
class PhaseWraparound : public Error {
public:
    using Error::Error;
};

/// A filtering or pruning step left nothing to work with.
class EmptyResult : public Error {
public:
    using Error::Error;
};

}  // namespace qrbf
