#pragma once

#include <span>
#include <vector>

#include "dbar/complex_grid.hpp"

namespace dbar {

/// Solid Cauchy transform g = dbar^{-1} f: convolution with 1/(pi z),
/// so dbar g = f and g -> 0 at infinity.
///
/// Realized on a 3x zero-padded torus through the closed-form Fourier
/// symbol of the kernel truncated to the disk |z| < 2.6 L,
///     K^(w) = -2i (1 - J0(2.6 L |w|)) / (w1 + i w2),
/// which makes the free-space convolution exact for every source in the
/// support disk and every target in [-L,L]^2 (the truncation circle never
/// meets the data). For f supported in |z| <= 0.8 L the pair
/// dbar_derivative(cauchy_transform(f)) == f holds to spectral accuracy.
///
/// Throws PreconditionError when |f| on the outermost cell ring exceeds
/// 1e-8 of max|f| (aliasing hazard).
ComplexGrid cauchy_transform(const ComplexGrid& f);

/// g with d g = f (anti-holomorphic counterpart); conj(cauchy(conj f)).
ComplexGrid anti_cauchy_transform(const ComplexGrid& f);

/// Spectral Cauchy-Riemann derivative (d/dx + i d/dy)/2 on the grid torus.
ComplexGrid dbar_derivative(const ComplexGrid& f);

/// Spectral (d/dx - i d/dy)/2.
ComplexGrid d_derivative(const ComplexGrid& f);

/// Pointwise evaluation of dbar^{-1} f at arbitrary targets by the lattice
/// sum (h^2/pi) sum_j f(z_j)/(x - z_j). Spectrally accurate for smooth
/// compactly supported f when the targets keep a distance from supp f;
/// O(h^2) otherwise. A target falling exactly on a node skips that node
/// (odd kernel cell).
std::vector<cplx> cauchy_transform_at(const ComplexGrid& f, std::span<const cplx> targets);

namespace detail {
/// Multiply the spectrum of an nx-grid by the dbar (or d) symbol in place.
void spectral_derivative(ComplexGrid& f, bool dbar);
}  // namespace detail

}  // namespace dbar
