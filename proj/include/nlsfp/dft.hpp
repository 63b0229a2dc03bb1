#pragma once

#include <complex>

namespace nlsfp {

/// Unnormalized complex DFT pair backed by cached FFTW plans.
/// forward:  X[k] = sum_j x[j] exp(-2*pi*i*j*k/n)
/// inverse:  x[j] = sum_k X[k] exp(+2*pi*i*j*k/n)   (no 1/n factor)
/// Plans are created once per size (mutex-guarded); execution is re-entrant,
/// so concurrent callers with distinct buffers are fine. In-place allowed.
void dft_forward(int n, const std::complex<double>* in, std::complex<double>* out);
void dft_inverse(int n, const std::complex<double>* in, std::complex<double>* out);

}  // namespace nlsfp
