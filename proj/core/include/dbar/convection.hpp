#pragma once

#include <utility>
#include <vector>

#include "dbar/complex_grid.hpp"
#include "dbar/dbar_system.hpp"

namespace dbar {

/// Real convection coefficients b1, b2 and the complex combination
/// b = (b1 + i b2)/4 the scattering machinery works with.
class ConvectionField {
public:
    ConvectionField() = default;
    /// b1, b2 must be real-valued (imaginary parts identically zero) and are
    /// masked outside support_radius.
    ConvectionField(ComplexGrid b1, ComplexGrid b2, double support_radius);

    const ComplexGrid& b1() const { return b1_; }
    const ComplexGrid& b2() const { return b2_; }
    const Potential& b() const { return b_; }
    double support_radius() const { return b_.support_radius(); }

private:
    ComplexGrid b1_, b2_;
    Potential b_;
};

/// q(z) = conj(b)(z) exp(dbar^{-1} b - d^{-1} conj(b))(z). The exponent is
/// 2i Im(dbar^{-1} b), purely imaginary, so |q| = |b| holds nodewise.
Potential q_from_b(const ConvectionField& f);

/// Solve dbar w + b w + e(z,-k) conj(b) conj(w) = 0 (variant 'r') or the
/// sign-flipped conjugate part (variant 'i'), w -> 1; the whole-plane
/// solutions W_r = e^{izk} w, W_i = i e^{izk} w.
ComplexGrid solve_w(const ConvectionField& f, cplx k, char variant,
                    const DbarSolveOptions& opt = {});

/// Boundary trace of the normalized solution w = e^{-izk} W on the circle
/// |z| = 1, evaluated at m equispaced angles through the integral
/// representation w = 1 - dbar^{-1}(source). The source is smooth and
/// supported in |z| <= support_radius, which must stay below 1.
std::vector<cplx> solve_w_trace(const ConvectionField& f, cplx k, char variant, int m,
                                const DbarSolveOptions& opt = {});

struct PhaseUnwrapResult {
    Potential b;              // recovered coefficient combination
    ComplexGrid v;            // auxiliary solution; equals e^{-dbar^{-1} b}
    int below_threshold = 0;  // nodes where |v| <= tau fell back to b = q
    double residual = 0.0;
};

/// Recover b from q = conj(b) e^{2i Im dbar^{-1} b} by one conjugate-linear
/// solve: v with dbar v + conj(q) conj(v) = 0, v -> 1 (then v = e^{-dbar^{-1}b}
/// and b = conj(q) conj(v) / v; where |v| <= tau = 1e-8 max|v| fall back to
/// b = q). Note the sign: the equation dbar v = +conj(qv) printed in the
/// source derivation inverts the conjugate factorization and does not close
/// the round trip; this one does.
PhaseUnwrapResult phase_unwrap(const Potential& q, const DbarSolveOptions& opt = {});

/// Diagnostic validating the second-order reduction: for a real grid field u
/// returns the L^2 norms of
///   r1 = Delta u + b1 u_x + b2 u_y            (5-point / centered stencils)
///   r2 = 4 (dbar w + conj(b) conj(w) + b w),  w = d u,
/// over interior nodes. The factor 4 (from Delta = 4 d dbar) makes the two
/// residuals directly comparable; they vanish together.
std::pair<double, double> elliptic_residual(const ConvectionField& f, const ComplexGrid& u);

}  // namespace dbar
