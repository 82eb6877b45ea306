#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dbar/complex_grid.hpp"
#include "dbar/convection.hpp"

namespace dbar {

/// Equispaced complex samples on the unit circle, theta_j = 2 pi j / m.
struct BoundaryFunction {
    std::vector<cplx> values;

    BoundaryFunction() = default;
    explicit BoundaryFunction(int m) : values(m) { validate(); }
    explicit BoundaryFunction(std::vector<cplx> v) : values(std::move(v)) { validate(); }

    int m() const { return int(values.size()); }
    double theta(int j) const;
    cplx node(int j) const;  // z_j = e^{i theta_j}
    cplx mean() const;

    void validate() const;  // m >= 64, even, finite values
};

/// Dense DtN matrix acting on boundary Fourier coefficients c_n, |n| <= modes.
/// Row/column order is n = -modes..modes.
struct DtNOperator {
    int modes = 0;
    Eigen::MatrixXcd matrix;
    std::string metadata;  // phantom id or provenance tag

    /// Truncate g to |n| <= modes, apply the matrix, synthesize on g's grid.
    BoundaryFunction apply(const BoundaryFunction& g) const;
};

/// Interior solution of the convection BVP on the polar collocation grid.
/// Radial values are Chebyshev points in (0, 1], radii[0] = 1.
struct DiskSolution {
    std::vector<double> radii;
    int ntheta = 0;
    std::vector<cplx> values;  // row-major: radius-major, theta-minor

    cplx at(int jr, int jt) const { return values[std::size_t(jr) * ntheta + jt]; }
    /// Barycentric (radial) x trigonometric (angular) interpolation.
    cplx eval(double r, double theta) const;
};

/// Spectral collocation solver for the convection equation on the unit disk:
/// Fourier in theta, Chebyshev in radius with the +/-r identification
/// (radial degree is forced odd so r = 0 is never a collocation point).
/// The real operator is factored once; each boundary datum costs two
/// triangular solves.
struct DiskSolverOptions {
    int radial_degree = 49;  // rounded up to odd
    int ntheta = 82;         // rounded up to even
};

class DiskSolver {
public:
    using Options = DiskSolverOptions;

    explicit DiskSolver(const ConvectionField& f, Options opt = {});

    int ntheta() const { return nt_; }
    int nradial() const { return nk_; }
    const std::vector<double>& radii() const { return radii_; }
    double theta(int p) const;

    /// Dirichlet data at the internal theta grid -> interior solution.
    DiskSolution solve(const std::vector<cplx>& g) const;
    /// Dirichlet data -> du/dr at r = 1 on the internal theta grid.
    std::vector<cplx> neumann(const std::vector<cplx>& g) const;

    /// Collocation matrix and the node map, for residual oracles in tests.
    const Eigen::MatrixXd& operator_matrix() const { return A_; }

private:
    int nt_ = 0, nk_ = 0;
    std::vector<double> x_;      // full Chebyshev points
    std::vector<double> radii_;  // kept positive points
    Eigen::MatrixXd cheb_d_;     // full differentiation matrix
    Eigen::MatrixXd A_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Solve the BVP for Dirichlet data g (arbitrary even sample count;
/// resampled spectrally onto the solver grid).
DiskSolution solve_bvp(const ConvectionField& f, const BoundaryFunction& g,
                       DiskSolverOptions opt = {});

/// Normal derivative of the BVP solution on g's theta grid.
BoundaryFunction dtn_apply(const ConvectionField& f, const BoundaryFunction& g,
                           DiskSolverOptions opt = {});

/// Assemble the DtN matrix on Fourier modes |n| <= modes.
DtNOperator assemble_dtn(const ConvectionField& f, int modes, DiskSolverOptions opt = {});

/// JSON round trip for DtNOperator files: {"modes", "matrix_re", "matrix_im"}.
void write_dtn(const std::string& path, const DtNOperator& op);
DtNOperator read_dtn(const std::string& path);

/// Right inverse of the tangential derivative: cumulative spectral
/// antiderivative from theta = 0. Requires zero mean
/// (|mean| <= 1e-10 (1 + max|f|)); throws PreconditionError otherwise.
BoundaryFunction ds_inverse(const BoundaryFunction& f);

/// H_b f = -Lambda ds^{-1} f, the Hilbert transform attached to the DtN map.
BoundaryFunction hilbert_Hb(const DtNOperator& dtn, const BoundaryFunction& f);

/// (I - i S_k) h at the sample nodes: the principal-value singular operator
/// characterizing traces of exterior-analytic functions with e^{izk}
/// behavior. Realized in the w = e^{-izk} h variable by the half-step
/// shifted trapezoid rule (sources resampled to midpoints), so that
/// (I - i S_k) h = 2 e^{izk} for any h with exterior-analytic w -> 1.
BoundaryFunction cauchy_singular(const BoundaryFunction& h, cplx k);

struct TraceSolveReport {
    std::vector<cplx> coeff_r;  // series coefficients a_0..a_N of h_r
    std::vector<cplx> coeff_i;  // of h_i
    double reg = 0.0;
    double residual30 = 0.0;    // relative, via cauchy_singular
    double residual31 = 0.0;    // relative L^2 of the H_b constraint (h_r)
    double condition = 0.0;     // R-diagonal ratio estimate from the QR
    double class_b_mean = 0.0;  // |mean(Im nu h_r)| after the solve
};

struct TraceRecovery {
    BoundaryFunction h_r;
    BoundaryFunction h_i;
    TraceSolveReport report;
};

/// Recover the boundary traces h_r, h_i of the whole-plane solutions from
/// the DtN operator at one k: parameterize h = e^{izk} sum_{n=0}^N a_n z^{-n}
/// (a_0 = 1 for h_r, = i for h_i, fixing the exterior normalization), impose
/// the interior constraint H_b(Im(nu h)) = Re(nu h) at m nodes plus the
/// class-B zero-mean row, and solve the stacked real least-squares system
/// with ridge parameter reg. Requires N <= m/4.
TraceRecovery recover_traces(const DtNOperator& dtn, cplx k, int N, double reg, int m = 256);

/// t(k) = (i/4pi) integral over the circle of
///        e^{i conj(zk)} conj(nu) (conj(Psi_r) - i conj(Psi_i)) dsigma,
/// with Psi traces recovered as h / einvb; trapezoid quadrature (spectrally
/// accurate on the circle). Prefactor in the Beals-Coifman normalization
/// used throughout. Throws PreconditionError when einvb nearly vanishes.
cplx boundary_scattering_transform(const BoundaryFunction& h_r, const BoundaryFunction& h_i,
                                   const BoundaryFunction& einvb, cplx k);

/// Estimate e^{-dbar^{-1} b} on the circle as the average over `directions`
/// values of k with |k| = Kmax of e^{-izk} h_r(z,k); the phase factor
/// normalizes the large-k limit of the recovered trace.
BoundaryFunction einvb_limit(const DtNOperator& dtn, double Kmax, int directions, int N,
                             double reg, int m = 256);

}  // namespace dbar
