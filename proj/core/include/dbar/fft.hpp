#pragma once

#include <complex>
#include <vector>

namespace dbar::fft {

/// In-place 2-D complex DFT of an n x n row-major buffer.
/// Plans are cached per size behind a mutex and executed through the
/// new-array interface, so concurrent transforms on distinct buffers are
/// safe. Plans use FFTW_ESTIMATE, which keeps the algorithm choice (and
/// therefore the bit pattern of results) reproducible across runs.
void forward(std::complex<double>* data, int n);

/// Inverse of forward (normalized by 1/n^2).
void inverse(std::complex<double>* data, int n);

/// In-place 1-D complex DFT of length n (any n).
void forward_1d(std::complex<double>* data, int n);

/// Inverse of forward_1d (normalized by 1/n).
void inverse_1d(std::complex<double>* data, int n);

}  // namespace dbar::fft
