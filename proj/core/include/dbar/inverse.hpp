#pragma once

#include "dbar/complex_grid.hpp"
#include "dbar/dbar_system.hpp"
#include "dbar/forward.hpp"

namespace dbar {

/// k-space solutions at one z: Phi_r = e^{izk} phi_r, Phi_i = i e^{izk} phi_i.
struct PhiPair {
    ComplexGrid phi_r;  // over k
    ComplexGrid phi_i;
    cplx z;
    int iterations = 0;
    double residual = 0.0;
};

/// Solve d phi / d kbar = sign t(k) e(z,-k) conj(phi), phi -> 1 over the
/// k-grid carrying t. sign = -1 yields phi_r, sign = +1 yields phi_i
/// (the assignment fixed by the first-order system the Jost columns solve:
/// phi_r = m1 - m2, phi_i = m1 + m2).
ComplexGrid solve_phi(const ScatteringTransform& t, cplx z, int sign,
                      const DbarSolveOptions& opt = {});

PhiPair solve_phi_pair(const ScatteringTransform& t, cplx z, const DbarSolveOptions& opt = {});

/// q(z) = -(i/2pi) h_k^2 sum_k e(z,k) conj(t)(k) (phi_r + phi_i)(z,k),
/// deterministic row-major summation; the mirror of
/// scattering_transform_volume, with the same normalization.
cplx reconstruct_q_at(const ScatteringTransform& t, const PhiPair& pair);
cplx reconstruct_q_at(const ScatteringTransform& t, cplx z, const DbarSolveOptions& opt = {});

/// Tabulate the reconstruction on a z-grid. Values are computed on nodes
/// with |z| <= eval_radius and zero outside; per-z solves run in parallel.
Potential reconstruct_q(const ScatteringTransform& t, int z_nx, double z_L, double eval_radius,
                        const DbarSolveOptions& opt = {}, int threads = 0);

/// Max deviation over the four real identities linking Psi's and Phi's at a
/// common (z,k) point,
///     Re Phi_i = -Im Psi_r,  Re Phi_r = Re Psi_r,
///     Im Phi_i =  Im Psi_i,  Im Phi_r = -Re Psi_i,
/// and of the combination Phi_r - i Phi_i = Psi_r - i Psi_i.
/// psi holds fields over z at fixed k, phi fields over k at fixed z;
/// (iz, jz) / (ik, jk) select the common point on either grid.
double identities_check(const PsiPair& psi, const PhiPair& phi, int iz, int jz, int ik, int jk);

}  // namespace dbar
