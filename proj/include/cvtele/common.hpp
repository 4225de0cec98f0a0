#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cvtele {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Failure categories. They line up with the CLI exit codes.
enum class ErrorKind {
    domain,      // caller passed an argument outside an operation's domain
    parse,       // malformed trajectory or config text
    numeric,     // quadrature / extrapolation failure, unphysical state
    io,          // unreadable or unwritable file
    validation,  // a validation-suite property failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
    if (!condition) fail(ErrorKind::domain, what);
}

}  // namespace cvtele
