#pragma once

#include <utility>

#include "dbar/complex_grid.hpp"
#include "dbar/dbar_system.hpp"

namespace dbar {

/// Exponentially normalized solutions of the physical-space equation at one k:
/// psi_r and psi_i with Psi_r = e^{izk} psi_r, Psi_i = i e^{izk} psi_i.
struct PsiPair {
    ComplexGrid psi_r;
    ComplexGrid psi_i;
    cplx k;
    int iterations = 0;
    double residual = 0.0;  // max of the two solve residuals
};

/// Scattering transform tabulated over a k-plane grid, zero for |k| > K.
struct ScatteringTransform {
    ComplexGrid grid;  // over k
    double K = 0.0;    // truncation radius

    ScatteringTransform() = default;
    ScatteringTransform(ComplexGrid g, double K);
};

/// First Jost column at one k: m1 -> 1, m2 -> 0.
struct JostColumns {
    ComplexGrid m1;
    ComplexGrid m2;
    cplx k;
};

/// Solve dbar psi + sign q e(z,-k) conj(psi) = 0 with psi -> 1.
/// sign = +1 gives psi_r, sign = -1 gives psi_i.
ComplexGrid solve_psi(const Potential& q, cplx k, int sign, const DbarSolveOptions& opt = {});

/// Both solutions at one k.
PsiPair solve_psi_pair(const Potential& q, cplx k, const DbarSolveOptions& opt = {});

/// t(k) = -(i/2pi) h^2 sum_z e(z,k) conj(q)(z) (psi_r + psi_i)(z), summed over
/// supp q in row-major order. The prefactor is the Beals-Coifman
/// normalization, for which this transform and reconstruct_q are exact
/// mutual inverses.
cplx scattering_transform_volume(const Potential& q, const PsiPair& pair);
cplx scattering_transform_volume(const Potential& q, cplx k, const DbarSolveOptions& opt = {});

/// Tabulate t over a k-grid (nodes with |k| <= K; zero outside). Per-k solves
/// run in parallel; the result is identical for any thread count.
ScatteringTransform scattering_grid(const Potential& q, int k_nx, double k_L, double K,
                                    const DbarSolveOptions& opt = {}, int threads = 0);

/// m1 = (psi_r + psi_i)/2, m2 = e(z,-k) (conj psi_i - conj psi_r)/2.
JostColumns jost_columns(const PsiPair& pair);

/// L^2 residuals of the first-order system
///     dbar m1 = q m2,   (d + ik) m2 = conj(q) m1,
/// evaluated in second-kind form (both equations inverted with the solid
/// Cauchy transform and compared against m1, m2 directly), which keeps the
/// check free of spectral-differentiation boundary artifacts:
///     r1 = || (m1 - 1) - dbar^{-1}(q m2) ||_2
///     r2 = || conj(m2) - e(z,k) dbar^{-1}( e(z,-k) q conj(m1) ) ||_2.
std::pair<double, double> dsys_residual(const JostColumns& j, const Potential& q);

}  // namespace dbar
