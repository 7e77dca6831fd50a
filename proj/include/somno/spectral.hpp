#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace somno {

struct TimeFrequencyMap {
    std::vector<double> times_s;   // segment centers
    std::vector<double> freqs_hz;  // ascending, 0..fs/2
    std::vector<std::vector<double>> power;  // [time][freq], V^2
};

struct EmdResult {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residue;
};

/// One-sided power spectrum of the demeaned signal. Powers sum to the
/// population variance of x (Parseval).
std::pair<std::vector<double>, std::vector<double>> periodogram(const std::vector<double>& x, double fs_hz);

/// Hann-windowed short-time spectra; frames = floor((len-seg)/hop)+1, each
/// frame demeaned before windowing. Power is normalized so a unit sinusoid at
/// a bin center contributes ~0.5 (its variance) to that bin.
TimeFrequencyMap stft(const std::vector<double>& x, double fs_hz, std::size_t seg_len, std::size_t hop);
TimeFrequencyMap stft_serial(const std::vector<double>& x, double fs_hz, std::size_t seg_len, std::size_t hop);

/// Per-frame sum of power over bins with lo <= f <= hi (inclusive).
std::vector<double> band_power_series(const TimeFrequencyMap& tf, double lo_hz, double hi_hz);

/// Two-level Daubechies-2 analysis with periodic boundary handling.
/// Odd lengths are extended by repeating the final sample before each level;
/// the inverse removes the extension, so reconstruction is exact for any length.
struct Dwt2Db2 {
    std::vector<double> ca2, cd2, cd1;
    std::size_t n0 = 0;  // input length
    std::size_t n1 = 0;  // level-1 approximation length (before level-2 padding)
};

Dwt2Db2 dwt2_db2(const std::vector<double>& x);
std::vector<double> idwt2_db2(const Dwt2Db2& d);

/// Empirical mode decomposition: cubic-spline envelope sifting with two
/// extrema mirrored at each boundary; a sift is accepted when the Cauchy
/// criterion drops below 0.3 (and the IMF extrema/zero-crossing counts agree
/// within one) or after 10 iterations. Decomposition stops at a monotone
/// residue or max_imfs.
EmdResult emd(const std::vector<double>& x, std::size_t max_imfs = 10);

/// Fraction of in-band spectral power held by the strongest in-band bin;
/// 0 when the band is empty or powerless. Scale-invariant.
double periodicity(const std::vector<double>& x, double fs_hz, double lo_hz, double hi_hz);

// helpers shared by EMD and its tests
std::size_t count_interior_extrema(const std::vector<double>& x);
std::size_t count_zero_crossings(const std::vector<double>& x);

} // namespace somno
