#pragma once

#include <complex>
#include <vector>

namespace somno {

/// One biquad of a cascade; a0 is normalized to 1.
struct BiquadSection {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

enum class FilterKind { Bandpass, Notch };

struct FilterSpec {
    FilterKind kind = FilterKind::Bandpass;
    int order = 0;  // analog prototype order for Bandpass
    double passband_lo_hz = 0.0;
    double passband_hi_hz = 0.0;
    double fs_hz = 0.0;
    std::vector<BiquadSection> sections;

    std::complex<double> response_at(double f_hz) const;
    double magnitude_at(double f_hz) const;
};

/// Digital band-pass from the analog Butterworth prototype via bilinear
/// transform with frequency prewarping, factored into stable second-order
/// sections. The -3 dB points land on lo/hi by construction; gain is
/// normalized to 1 at the (prewarped) geometric center.
FilterSpec design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs_hz);

/// Single-biquad IIR notch at f0 with the given quality factor.
FilterSpec design_notch(double f0_hz, double q, double fs_hz);

/// Zero-phase forward-backward filtering with odd-reflection edge padding of
/// length 3*(2*sections + 1). Output length equals input length.
/// Throws on NaN input or input not longer than the pad.
std::vector<double> filtfilt(const FilterSpec& spec, const std::vector<double>& x);

/// Post-reception cleanup: NaN gaps linearly interpolated, 60 Hz notch (Q=30,
/// skipped when fs <= 120 or the input is too short), sliding median (kernel 3),
/// then clamping of samples deviating more than 5 MAD from a 1 s rolling median.
/// Degenerate inputs pass through unchanged.
std::vector<double> preprocess(const std::vector<double>& x, double fs_hz);
std::vector<double> preprocess_serial(const std::vector<double>& x, double fs_hz);

/// Linear interpolation of x anchored at the given output-timeline positions
/// (one per input sample, strictly increasing), constant beyond the ends.
std::vector<double> upsample_linear(const std::vector<double>& x, std::size_t target_len,
                                    const std::vector<double>& centers);

/// Fill NaN runs by linear interpolation between surrounding finite samples;
/// leading/trailing runs take the nearest finite value. All-NaN input is
/// returned unchanged.
std::vector<double> interpolate_nans(std::vector<double> x);

} // namespace somno
