#include "dbar/gmres.hpp"

#include <cmath>

namespace dbar {

GmresResult gmres(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                  const Eigen::VectorXd& b, Eigen::VectorXd& x, const GmresOptions& opt) {
    GmresResult res;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        x.setZero(b.size());
        res.converged = true;
        return res;
    }
    if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());

    const int m = opt.restart;
    Eigen::MatrixXd V(b.size(), m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1), w(b.size()), r(b.size());

    int total_it = 0;
    while (total_it < opt.max_iterations) {
        apply(x, r);
        r = b - r;
        double beta = r.norm();
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= opt.tol) {
            res.converged = true;
            return res;
        }
        V.col(0) = r / beta;
        g.setZero();
        g(0) = beta;

        int j = 0;
        for (; j < m && total_it < opt.max_iterations; ++j, ++total_it) {
            apply(V.col(j), w);
            // modified Gram-Schmidt
            for (int i = 0; i <= j; ++i) {
                H(i, j) = w.dot(V.col(i));
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);

            // apply accumulated Givens rotations to the new column
            for (int i = 0; i < j; ++i) {
                const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            const double denom = std::hypot(H(j, j), H(j + 1, j));
            if (denom == 0.0) {
                cs(j) = 1.0;
                sn(j) = 0.0;
            } else {
                cs(j) = H(j, j) / denom;
                sn(j) = H(j + 1, j) / denom;
            }
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);

            res.iterations = total_it + 1;
            res.relative_residual = std::abs(g(j + 1)) / bnorm;
            if (res.relative_residual <= opt.tol) {
                ++j;
                break;
            }
            if (H(j, j) == 0.0) break;  // breakdown; restart from current x
        }

        // back-substitution for the minimizer over the Krylov basis
        Eigen::VectorXd y(j);
        for (int i = j - 1; i >= 0; --i) {
            double s = g(i);
            for (int k2 = i + 1; k2 < j; ++k2) s -= H(i, k2) * y(k2);
            y(i) = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
        }
        for (int i = 0; i < j; ++i) x += y(i) * V.col(i);

        if (res.relative_residual <= opt.tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

}  // namespace dbar
