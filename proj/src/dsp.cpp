#include "somno/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace somno {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

cd bilinear(cd s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

// denominator (1 - z1 q)(1 - z2 q) in q = z^-1; z1,z2 conjugate or both real
void pole_pair_to_denominator(cd z1, cd z2, double& a1, double& a2) {
    a1 = -(z1 + z2).real();
    a2 = (z1 * z2).real();
}

double median_of(std::vector<double>& w) {
    const std::size_t m = w.size();
    auto mid = w.begin() + m / 2;
    std::nth_element(w.begin(), mid, w.end());
    if (m % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(w.begin(), mid);
    return 0.5 * (lo + hi);
}

// One pass of the SOS cascade with steady-state initial conditions scaled by
// the first sample (keeps start-up transients out of filtfilt).
void sosfilt_inplace(const std::vector<BiquadSection>& sections, std::vector<double>& x) {
    if (x.empty()) return;
    for (const auto& s : sections) {
        const double denom = 1.0 + s.a1 + s.a2;
        const double h1 = denom != 0.0 ? (s.b0 + s.b1 + s.b2) / denom : 0.0;
        double z1 = (h1 - s.b0) * x[0];
        double z2 = (s.b2 - s.a2 * h1) * x[0];
        for (double& xi : x) {
            const double in = xi;
            const double y = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * y + z2;
            z2 = s.b2 * in - s.a2 * y;
            xi = y;
        }
    }
}

std::vector<double> rolling_median_window(const std::vector<double>& x, std::size_t i, std::size_t half) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    return std::vector<double>(x.begin() + lo, x.begin() + hi);
}

// Outlier clamp stage of preprocess; `parallel` toggles the OpenMP path so the
// serial version stays available as a reference.
std::vector<double> clamp_outliers(const std::vector<double>& x, double fs, bool parallel) {
    std::size_t win = static_cast<std::size_t>(std::llround(fs));
    if (win < 3) win = 3;
    if (win % 2 == 0) ++win;
    const std::size_t half = win / 2;
    const auto n = static_cast<std::ptrdiff_t>(x.size());

    std::vector<double> out(x.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto w = rolling_median_window(x, static_cast<std::size_t>(i), half);
        const double med = median_of(w);
        for (double& v : w) v = std::abs(v - med);
        const double mad = median_of(w);
        out[i] = std::abs(x[i] - med) > 5.0 * mad ? med : x[i];
    }
    return out;
}

std::vector<double> preprocess_impl(const std::vector<double>& x, double fs, bool parallel) {
    if (x.empty()) return x;
    std::vector<double> y = interpolate_nans(x);
    bool any_finite = false;
    for (double v : y)
        if (std::isfinite(v)) { any_finite = true; break; }
    if (!any_finite) return y;

    if (fs > 120.0) {
        const FilterSpec notch = design_notch(60.0, 30.0, fs);
        // A 60 Hz notch close to Nyquist has poles near the unit circle, so the
        // standard short filtfilt pad leaves a long settling transient. Extend
        // the signal by its own odd reflection up to the settling length first.
        const double radius = std::sqrt(notch.sections[0].a2);
        const auto settle = static_cast<std::size_t>(std::ceil(std::log(1e-5) / std::log(radius)));
        const std::size_t pad = std::min(settle, y.size() > 1 ? y.size() - 1 : 0);
        const std::size_t base_pad = 3 * (2 * notch.sections.size() + 1);
        if (pad > base_pad && y.size() > base_pad) {
            std::vector<double> ext;
            ext.reserve(y.size() + 2 * pad);
            const std::size_t n = y.size();
            for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * y[0] - y[k]);
            ext.insert(ext.end(), y.begin(), y.end());
            for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * y[n - 1] - y[n - 1 - k]);
            ext = filtfilt(notch, ext);
            y.assign(ext.begin() + pad, ext.begin() + pad + n);
        } else if (y.size() > base_pad) {
            y = filtfilt(notch, y);
        }
    }

    if (y.size() >= 3) {
        std::vector<double> med(y.size());
        med.front() = y.front();
        med.back() = y.back();
        for (std::size_t i = 1; i + 1 < y.size(); ++i) {
            double a = y[i - 1], b = y[i], c = y[i + 1];
            // median of three
            med[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
        }
        y = std::move(med);
    }

    return clamp_outliers(y, fs, parallel);
}

} // namespace

std::complex<double> FilterSpec::response_at(double f_hz) const {
    const double w = 2.0 * kPi * f_hz / fs_hz;
    const cd q = std::exp(cd(0.0, -w));  // z^-1
    cd h(1.0, 0.0);
    for (const auto& s : sections)
        h *= (s.b0 + s.b1 * q + s.b2 * q * q) / (1.0 + s.a1 * q + s.a2 * q * q);
    return h;
}

double FilterSpec::magnitude_at(double f_hz) const { return std::abs(response_at(f_hz)); }

FilterSpec design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs_hz) {
    if (order < 1) throw std::invalid_argument("filter order must be >= 1");
    if (!(lo_hz > 0.0) || !(lo_hz < hi_hz) || !(hi_hz < fs_hz / 2.0))
        throw std::invalid_argument("band edges must satisfy 0 < lo < hi < fs/2");

    const double wl = 2.0 * fs_hz * std::tan(kPi * lo_hz / fs_hz);
    const double wh = 2.0 * fs_hz * std::tan(kPi * hi_hz / fs_hz);
    const double w0 = std::sqrt(wl * wh);
    const double bw = wh - wl;

    FilterSpec spec;
    spec.kind = FilterKind::Bandpass;
    spec.order = order;
    spec.passband_lo_hz = lo_hz;
    spec.passband_hi_hz = hi_hz;
    spec.fs_hz = fs_hz;

    // Low-pass prototype pole p maps to the two band-pass poles solving
    // s^2 - p*bw*s + w0^2 = 0. Conjugate prototype poles give the conjugate
    // band-pass poles, so sections are built from Im(p) >= 0 only.
    for (int k = 0; k < order; ++k) {
        const double theta = kPi / 2.0 + kPi * (2.0 * k + 1.0) / (2.0 * order);
        const cd p(std::cos(theta), std::sin(theta));
        if (p.imag() < -1e-12) continue;

        const cd disc = std::sqrt(p * p * bw * bw - 4.0 * w0 * w0);
        const cd s_plus = (p * bw + disc) / 2.0;
        const cd s_minus = (p * bw - disc) / 2.0;

        auto add_section = [&spec, fs_hz](cd z1, cd z2) {
            BiquadSection sec;
            sec.b0 = 1.0;
            sec.b1 = 0.0;
            sec.b2 = -1.0;  // one zero at z=1 (from s=0), one at z=-1 (from s=inf)
            pole_pair_to_denominator(z1, z2, sec.a1, sec.a2);
            if (std::abs(z1) >= 1.0 || std::abs(z2) >= 1.0)
                throw std::runtime_error("unstable band-pass section (pole outside unit circle)");
            spec.sections.push_back(sec);
        };

        if (std::abs(p.imag()) <= 1e-12) {
            // real prototype pole: its two band-pass poles form one section
            add_section(bilinear(s_plus, fs_hz), bilinear(s_minus, fs_hz));
        } else {
            add_section(bilinear(s_plus, fs_hz), std::conj(bilinear(s_plus, fs_hz)));
            add_section(bilinear(s_minus, fs_hz), std::conj(bilinear(s_minus, fs_hz)));
        }
    }

    // Unity gain at the digital image of the analog center frequency.
    const double f_center = fs_hz / kPi * std::atan(w0 / (2.0 * fs_hz));
    const double mag = spec.magnitude_at(f_center);
    if (!(mag > 0.0)) throw std::runtime_error("degenerate band-pass design");
    const double g = std::pow(1.0 / mag, 1.0 / static_cast<double>(spec.sections.size()));
    for (auto& s : spec.sections) {
        s.b0 *= g;
        s.b1 *= g;
        s.b2 *= g;
    }
    return spec;
}

FilterSpec design_notch(double f0_hz, double q, double fs_hz) {
    if (!(f0_hz > 0.0) || !(f0_hz < fs_hz / 2.0)) throw std::invalid_argument("notch frequency out of range");
    if (!(q > 0.0)) throw std::invalid_argument("notch Q must be positive");
    const double w0 = 2.0 * kPi * f0_hz / fs_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;

    FilterSpec spec;
    spec.kind = FilterKind::Notch;
    spec.order = 2;
    spec.passband_lo_hz = f0_hz;
    spec.passband_hi_hz = f0_hz;
    spec.fs_hz = fs_hz;
    BiquadSection s;
    s.b0 = 1.0 / a0;
    s.b1 = -2.0 * std::cos(w0) / a0;
    s.b2 = 1.0 / a0;
    s.a1 = -2.0 * std::cos(w0) / a0;
    s.a2 = (1.0 - alpha) / a0;
    spec.sections.push_back(s);
    return spec;
}

std::vector<double> filtfilt(const FilterSpec& spec, const std::vector<double>& x) {
    const std::size_t pad = 3 * (2 * spec.sections.size() + 1);
    if (x.size() <= pad)
        throw std::invalid_argument("filtfilt: input length must exceed pad length " + std::to_string(pad));
    for (double v : x)
        if (std::isnan(v)) throw std::invalid_argument("filtfilt: NaN in input (interpolate gaps first)");

    const std::size_t n = x.size();
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[n - 1] - x[n - 1 - k]);

    // Symmetrized zero-phase pass: average of forward-backward and
    // backward-forward runs. Either run alone leaves direction-dependent
    // boundary transients; the average makes time-reversal symmetry exact.
    std::vector<double> fb = ext;
    sosfilt_inplace(spec.sections, fb);
    std::reverse(fb.begin(), fb.end());
    sosfilt_inplace(spec.sections, fb);
    std::reverse(fb.begin(), fb.end());

    std::vector<double> bf = std::move(ext);
    std::reverse(bf.begin(), bf.end());
    sosfilt_inplace(spec.sections, bf);
    std::reverse(bf.begin(), bf.end());
    sosfilt_inplace(spec.sections, bf);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (fb[i + pad] + bf[i + pad]);
    return out;
}

std::vector<double> preprocess(const std::vector<double>& x, double fs_hz) {
    return preprocess_impl(x, fs_hz, true);
}

std::vector<double> preprocess_serial(const std::vector<double>& x, double fs_hz) {
    return preprocess_impl(x, fs_hz, false);
}

std::vector<double> upsample_linear(const std::vector<double>& x, std::size_t target_len,
                                    const std::vector<double>& centers) {
    if (x.empty()) throw std::invalid_argument("upsample_linear: empty input");
    if (centers.size() != x.size())
        throw std::invalid_argument("upsample_linear: one anchor position per input sample required");

    std::vector<double> out(target_len);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < target_len; ++i) {
        const auto t = static_cast<double>(i);
        if (t <= centers.front()) {
            out[i] = x.front();
            continue;
        }
        if (t >= centers.back()) {
            out[i] = x.back();
            continue;
        }
        while (seg + 1 < centers.size() && centers[seg + 1] < t) ++seg;
        const double t0 = centers[seg], t1 = centers[seg + 1];
        const double u = (t - t0) / (t1 - t0);
        out[i] = x[seg] + u * (x[seg + 1] - x[seg]);
    }
    return out;
}

std::vector<double> interpolate_nans(std::vector<double> x) {
    const std::size_t n = x.size();
    std::size_t first_finite = n;
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isnan(x[i])) { first_finite = i; break; }
    if (first_finite == n) return x;

    for (std::size_t i = 0; i < first_finite; ++i) x[i] = x[first_finite];

    std::size_t last = first_finite;
    for (std::size_t i = first_finite + 1; i < n; ++i) {
        if (std::isnan(x[i])) continue;
        if (i > last + 1) {
            const double step = (x[i] - x[last]) / static_cast<double>(i - last);
            for (std::size_t k = last + 1; k < i; ++k)
                x[k] = x[last] + step * static_cast<double>(k - last);
        }
        last = i;
    }
    for (std::size_t i = last + 1; i < n; ++i) x[i] = x[last];
    return x;
}

} // namespace somno
