#pragma once

#include <Eigen/Dense>
#include <functional>

namespace dbar {

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;
};

struct GmresOptions {
    double tol = 1e-10;   // relative residual target
    int restart = 40;
    int max_iterations = 500;
};

/// Restarted GMRES for x in A x = b with a matrix-free operator.
/// Deterministic: no randomization, fixed reduction order.
GmresResult gmres(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                  const Eigen::VectorXd& b, Eigen::VectorXd& x, const GmresOptions& opt = {});

}  // namespace dbar
