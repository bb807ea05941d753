#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gydet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pivot of the propagated factor fell below the crossing threshold at a
/// given longitudinal slice (zero mode or an eigenvalue crossing zero).
class SingularCrossing : public Error {
public:
    SingularCrossing(std::size_t slice, double pivot)
        : Error("singular crossing at slice " + std::to_string(slice) +
                " (|pivot| = " + std::to_string(pivot) + ")"),
          slice_(slice), pivot_(pivot) {}

    std::size_t slice() const noexcept { return slice_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t slice_;
    double pivot_;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

/// Dense storage refused; the message points at the recursion route.
class SizeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// The continuum solution changed sign at the endpoint, so the log of the
/// determinant ratio is undefined in real arithmetic.
class SignChange : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace gydet
