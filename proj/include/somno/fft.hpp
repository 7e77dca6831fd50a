#pragma once

#include <complex>
#include <vector>

namespace somno {

/// In-place complex FFT for power-of-two lengths (iterative radix-2).
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Complex DFT of arbitrary length (Bluestein's chirp-z for non powers of two).
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x, bool inverse = false);

/// DFT of a real signal; returns the full complex spectrum of length x.size().
std::vector<std::complex<double>> fft_real(const std::vector<double>& x);

} // namespace somno
