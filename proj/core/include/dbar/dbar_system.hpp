#pragma once

#include "dbar/complex_grid.hpp"
#include "dbar/gmres.hpp"

namespace dbar {

struct DbarSolveOptions {
    double tol = 1e-10;
    int restart = 40;
    int max_iterations = 500;
};

struct DbarSolution {
    ComplexGrid psi;        // the solution, psi -> 1 at the grid boundary
    int iterations = 0;
    double residual = 0.0;  // relative residual of the integral equation, re-evaluated
};

/// Solve the conjugate-linear problem
///     dbar psi + c psi + s a conj(psi) = 0,   psi -> 1,
/// through its second-kind integral form
///     (I + dbar^{-1}[c (.) + s a conj(.)]) (psi - 1) = -dbar^{-1}[c + s a]
/// as a real-linear system (real/imaginary split) with restarted GMRES.
///
/// c may be empty (the pure conjugate-linear case of the psi/phi equations).
/// Both coefficient fields must be compactly supported away from the grid
/// boundary. For c = a = 0 the solve returns psi == 1 exactly.
///
/// Throws SolverError on non-convergence (carrying the last residual).
DbarSolution solve_dbar_system(const ComplexGrid* c, const ComplexGrid& a, double sign,
                               const DbarSolveOptions& opt = {});

/// -dbar(psi) for a solution of the system above, assembled from the
/// coefficients (c psi + s a conj(psi)); compactly supported, so
/// psi = 1 - dbar^{-1} of it. Used for off-grid trace evaluation.
ComplexGrid dbar_source_field(const ComplexGrid& psi, const ComplexGrid* c,
                              const ComplexGrid& a, double sign);

}  // namespace dbar
