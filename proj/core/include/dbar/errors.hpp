#pragma once

#include <stdexcept>
#include <string>

namespace dbar {

/// Violated caller contract (bad grid, support touching the boundary ring,
/// nonzero-mean input to ds_inverse, ...). CLI exit code 2.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative or direct solve failed (non-convergence, singular system).
/// Carries the last residual where meaningful. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

/// Malformed or mismatched file content.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dbar
