#ifndef PTYCHO_FFT_HPP
#define PTYCHO_FFT_HPP

#include "fields.hpp"

namespace ptycho {

/// Unnormalized forward discrete Fourier transform:
///   F(xi) = sum_r f(r) * exp(-i 2*pi r.xi / N)
/// Parseval bookkeeping: sum |F|^2 = nx*ny * sum |f|^2.
ComplexField dft2(const ComplexField& f);

/// Inverse transform carrying the 1/(nx*ny) factor, so idft2(dft2(f)) == f.
ComplexField idft2(const ComplexField& F);

/// Low-level out-of-place transforms on raw buffers (row-major, ny rows of
/// nx). `in` and `out` must be distinct. The inverse variant is unnormalized
/// (no 1/N factor); callers scale as needed.
void fft2_forward_raw(int nx, int ny, const cdouble* in, cdouble* out);
void fft2_backward_raw(int nx, int ny, const cdouble* in, cdouble* out);

}  // namespace ptycho

#endif
