#pragma once

#include <complex>
#include <vector>

namespace gluconet::fft {

using cdouble = std::complex<double>;

/// In-place iterative radix-2 transform; size must be a power of two.
void fft_pow2(std::vector<cdouble>& a, bool inverse);

/// Forward DFT of arbitrary size (Bluestein fallback for non powers of two).
std::vector<cdouble> fft(const std::vector<cdouble>& a);

/// Inverse DFT (includes the 1/n factor).
std::vector<cdouble> ifft(const std::vector<cdouble>& a);

}  // namespace gluconet::fft
