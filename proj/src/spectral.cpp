#include "somno/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "somno/fft.hpp"

namespace somno {

namespace {

constexpr double kPi = std::numbers::pi;

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Natural cubic spline through strictly increasing knots, evaluated at
// integer positions 0..n_out-1 (linear extrapolation beyond the knots).
std::vector<double> natural_spline_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                                        std::size_t n_out) {
    const std::size_t m = xs.size();
    std::vector<double> out(n_out);
    if (m == 1) {
        std::fill(out.begin(), out.end(), ys[0]);
        return out;
    }
    if (m == 2) {
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (std::size_t i = 0; i < n_out; ++i)
            out[i] = ys[0] + slope * (static_cast<double>(i) - xs[0]);
        return out;
    }

    // second derivatives via the tridiagonal system, natural end conditions
    std::vector<double> d2(m, 0.0), diag(m - 2), off(m - 2), rhs(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double hm = xs[i] - xs[i - 1];
        const double hp = xs[i + 1] - xs[i];
        diag[i - 1] = (hm + hp) / 3.0;
        off[i - 1] = hp / 6.0;
        rhs[i - 1] = (ys[i + 1] - ys[i]) / hp - (ys[i] - ys[i - 1]) / hm;
    }
    for (std::size_t i = 1; i < rhs.size(); ++i) {
        const double q = off[i - 1] / diag[i - 1];
        diag[i] -= q * off[i - 1];
        rhs[i] -= q * rhs[i - 1];
    }
    if (!rhs.empty()) {
        d2[m - 2] = rhs.back() / diag.back();
        for (std::size_t i = rhs.size() - 1; i-- > 0;)
            d2[i + 1] = (rhs[i] - off[i] * d2[i + 2]) / diag[i];
    }

    std::size_t seg = 0;
    for (std::size_t i = 0; i < n_out; ++i) {
        const auto t = static_cast<double>(i);
        if (t <= xs.front()) {
            const double h = xs[1] - xs[0];
            const double slope = (ys[1] - ys[0]) / h - h * (2.0 * d2[0] + d2[1]) / 6.0;
            out[i] = ys[0] + slope * (t - xs[0]);
            continue;
        }
        if (t >= xs.back()) {
            const double h = xs[m - 1] - xs[m - 2];
            const double slope = (ys[m - 1] - ys[m - 2]) / h + h * (d2[m - 2] + 2.0 * d2[m - 1]) / 6.0;
            out[i] = ys[m - 1] + slope * (t - xs[m - 1]);
            continue;
        }
        while (seg + 1 < m && xs[seg + 1] < t) ++seg;
        const double h = xs[seg + 1] - xs[seg];
        const double a = (xs[seg + 1] - t) / h;
        const double b = (t - xs[seg]) / h;
        out[i] = a * ys[seg] + b * ys[seg + 1] +
                 ((a * a * a - a) * d2[seg] + (b * b * b - b) * d2[seg + 1]) * h * h / 6.0;
    }
    return out;
}

// Interior extrema with plateau handling (a flat run counts once, at its middle).
void find_extrema(const std::vector<double>& x, std::vector<std::size_t>& maxima,
                  std::vector<std::size_t>& minima) {
    maxima.clear();
    minima.clear();
    const std::size_t n = x.size();
    if (n < 3) return;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] > x[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[j]) ++j;
            if (j + 1 < n && x[j + 1] < x[j]) maxima.push_back((i + j) / 2);
            i = j + 1;
        } else if (x[i] < x[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[j]) ++j;
            if (j + 1 < n && x[j + 1] > x[j]) minima.push_back((i + j) / 2);
            i = j + 1;
        } else {
            ++i;
        }
    }
}

// Envelope through the given extrema, with up to two extrema mirrored across
// each end of the signal.
std::vector<double> envelope(const std::vector<double>& x, const std::vector<std::size_t>& idx) {
    const double last = static_cast<double>(x.size()) - 1.0;
    std::vector<double> xs, ys;
    const std::size_t nb = std::min<std::size_t>(2, idx.size());
    for (std::size_t k = nb; k-- > 0;) {  // ascending mirrored positions < 0
        xs.push_back(-static_cast<double>(idx[k]));
        ys.push_back(x[idx[k]]);
    }
    for (std::size_t k : idx) {
        xs.push_back(static_cast<double>(k));
        ys.push_back(x[k]);
    }
    for (std::size_t j = 0; j < nb; ++j) {
        const std::size_t src = idx[idx.size() - 1 - j];
        xs.push_back(2.0 * last - static_cast<double>(src));
        ys.push_back(x[src]);
    }
    return natural_spline_eval(xs, ys, x.size());
}

// single level of the periodic db2 transform; x must have even length
void db2_analysis(const std::vector<double>& x, std::vector<double>& ca, std::vector<double>& cd) {
    static const double s3 = std::sqrt(3.0);
    static const double h[4] = {(1.0 + s3) / (4.0 * std::numbers::sqrt2), (3.0 + s3) / (4.0 * std::numbers::sqrt2),
                                (3.0 - s3) / (4.0 * std::numbers::sqrt2), (1.0 - s3) / (4.0 * std::numbers::sqrt2)};
    static const double g[4] = {h[3], -h[2], h[1], -h[0]};
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    ca.assign(half, 0.0);
    cd.assign(half, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double v = x[(2 * i + k) % n];
            a += h[k] * v;
            d += g[k] * v;
        }
        ca[i] = a;
        cd[i] = d;
    }
}

std::vector<double> db2_synthesis(const std::vector<double>& ca, const std::vector<double>& cd) {
    static const double s3 = std::sqrt(3.0);
    static const double h[4] = {(1.0 + s3) / (4.0 * std::numbers::sqrt2), (3.0 + s3) / (4.0 * std::numbers::sqrt2),
                                (3.0 - s3) / (4.0 * std::numbers::sqrt2), (1.0 - s3) / (4.0 * std::numbers::sqrt2)};
    static const double g[4] = {h[3], -h[2], h[1], -h[0]};
    const std::size_t n = 2 * ca.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t k = 0; k < 4; ++k)
            x[(2 * i + k) % n] += h[k] * ca[i] + g[k] * cd[i];
    return x;
}

std::vector<double> pad_even(std::vector<double> x) {
    if (x.size() % 2 == 1) x.push_back(x.back());
    return x;
}

TimeFrequencyMap stft_impl(const std::vector<double>& x, double fs_hz, std::size_t seg_len,
                           std::size_t hop, bool parallel) {
    if (hop == 0 || hop > seg_len) throw std::invalid_argument("stft: need 0 < hop <= seg_len");
    if (seg_len > x.size()) throw std::invalid_argument("stft: segment longer than signal");

    const std::size_t n_frames = (x.size() - seg_len) / hop + 1;
    const std::size_t n_bins = seg_len / 2 + 1;

    std::vector<double> window(seg_len);
    double wsum = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(seg_len)));
        wsum += window[i];
    }
    const double scale = 2.0 / (wsum * wsum);

    TimeFrequencyMap tf;
    tf.freqs_hz.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
        tf.freqs_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(seg_len);
    tf.times_s.resize(n_frames);
    tf.power.assign(n_frames, std::vector<double>(n_bins, 0.0));

    const auto frames = static_cast<std::ptrdiff_t>(n_frames);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t f = 0; f < frames; ++f) {
        const std::size_t start = static_cast<std::size_t>(f) * hop;
        std::vector<double> seg(x.begin() + start, x.begin() + start + seg_len);
        const double mu = mean_of(seg);
        for (std::size_t i = 0; i < seg_len; ++i) seg[i] = (seg[i] - mu) * window[i];
        auto spec = fft_real(seg);
        auto& row = tf.power[f];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double p = std::norm(spec[k]) * scale;
            row[k] = (k == 0 || (seg_len % 2 == 0 && k == n_bins - 1)) ? p / 2.0 : p;
        }
        tf.times_s[f] = (static_cast<double>(start) + (static_cast<double>(seg_len) - 1.0) / 2.0) / fs_hz;
    }
    return tf;
}

} // namespace

std::pair<std::vector<double>, std::vector<double>> periodogram(const std::vector<double>& x, double fs_hz) {
    if (x.size() < 2) throw std::invalid_argument("periodogram: need at least 2 samples");
    for (double v : x)
        if (std::isnan(v)) throw std::invalid_argument("periodogram: NaN in input");

    const std::size_t n = x.size();
    std::vector<double> d(x);
    const double mu = mean_of(d);
    for (double& v : d) v -= mu;

    auto spec = fft_real(d);
    const std::size_t n_bins = n / 2 + 1;
    std::vector<double> freqs(n_bins), power(n_bins);
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    for (std::size_t k = 0; k < n_bins; ++k) {
        freqs[k] = static_cast<double>(k) * fs_hz / static_cast<double>(n);
        double p = std::norm(spec[k]) * scale;
        if (k != 0 && !(n % 2 == 0 && k == n_bins - 1)) p *= 2.0;
        power[k] = p;
    }
    return {std::move(freqs), std::move(power)};
}

TimeFrequencyMap stft(const std::vector<double>& x, double fs_hz, std::size_t seg_len, std::size_t hop) {
    return stft_impl(x, fs_hz, seg_len, hop, true);
}

TimeFrequencyMap stft_serial(const std::vector<double>& x, double fs_hz, std::size_t seg_len, std::size_t hop) {
    return stft_impl(x, fs_hz, seg_len, hop, false);
}

std::vector<double> band_power_series(const TimeFrequencyMap& tf, double lo_hz, double hi_hz) {
    if (!(lo_hz < hi_hz)) throw std::invalid_argument("band_power_series: need lo < hi");
    if (lo_hz < 0.0 || (!tf.freqs_hz.empty() && hi_hz > tf.freqs_hz.back() + 1e-9))
        throw std::invalid_argument("band_power_series: band outside [0, fs/2]");

    std::vector<double> out(tf.power.size(), 0.0);
    for (std::size_t f = 0; f < tf.power.size(); ++f) {
        double s = 0.0;
        for (std::size_t k = 0; k < tf.freqs_hz.size(); ++k)
            if (tf.freqs_hz[k] >= lo_hz && tf.freqs_hz[k] <= hi_hz) s += tf.power[f][k];
        out[f] = s;
    }
    return out;
}

Dwt2Db2 dwt2_db2(const std::vector<double>& x) {
    if (x.size() < 4) throw std::invalid_argument("dwt2_db2: need at least 4 samples");
    Dwt2Db2 d;
    d.n0 = x.size();

    std::vector<double> ca1;
    {
        auto padded = pad_even(x);
        db2_analysis(padded, ca1, d.cd1);
    }
    d.n1 = ca1.size();
    {
        auto padded = pad_even(std::move(ca1));
        db2_analysis(padded, d.ca2, d.cd2);
    }
    return d;
}

std::vector<double> idwt2_db2(const Dwt2Db2& d) {
    auto ca1 = db2_synthesis(d.ca2, d.cd2);
    ca1.resize(d.n1);
    auto x = db2_synthesis(ca1, d.cd1);
    x.resize(d.n0);
    return x;
}

std::size_t count_interior_extrema(const std::vector<double>& x) {
    std::vector<std::size_t> maxima, minima;
    find_extrema(x, maxima, minima);
    return maxima.size() + minima.size();
}

std::size_t count_zero_crossings(const std::vector<double>& x) {
    std::size_t count = 0;
    int last_sign = 0;
    for (double v : x) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s != 0) {
            if (last_sign != 0 && s != last_sign) ++count;
            last_sign = s;
        }
    }
    return count;
}

EmdResult emd(const std::vector<double>& x, std::size_t max_imfs) {
    if (x.size() < 8) throw std::invalid_argument("emd: need at least 8 samples");
    for (double v : x)
        if (std::isnan(v)) throw std::invalid_argument("emd: NaN in input");

    EmdResult result;
    std::vector<double> residue = x;
    std::vector<std::size_t> maxima, minima;

    for (std::size_t imf_idx = 0; imf_idx < max_imfs; ++imf_idx) {
        find_extrema(residue, maxima, minima);
        if (maxima.empty() || minima.empty()) break;  // monotone (or degenerate) residue

        std::vector<double> h = residue;
        // Cauchy criterion with a 10-iteration cap; a few extra sifts are
        // allowed (hard cap 50) when the candidate still violates the IMF
        // extrema/zero-crossing rule.
        for (int iter = 0; iter < 50; ++iter) {
            find_extrema(h, maxima, minima);
            if (maxima.empty() || minima.empty()) break;
            const auto upper = envelope(h, maxima);
            const auto lower = envelope(h, minima);

            std::vector<double> next(h.size());
            double diff2 = 0.0, prev2 = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                next[i] = h[i] - 0.5 * (upper[i] + lower[i]);
                const double dd = h[i] - next[i];
                diff2 += dd * dd;
                prev2 += h[i] * h[i];
            }
            const double sd = prev2 > 0.0 ? diff2 / prev2 : 0.0;
            h = std::move(next);

            const std::size_t ext = count_interior_extrema(h);
            const std::size_t zc = count_zero_crossings(h);
            const bool counts_ok = (ext > zc ? ext - zc : zc - ext) <= 1;
            if (counts_ok && (sd < 0.3 || iter >= 9)) break;
        }

        for (std::size_t i = 0; i < residue.size(); ++i) residue[i] -= h[i];
        result.imfs.push_back(std::move(h));
    }

    result.residue = std::move(residue);
    return result;
}

double periodicity(const std::vector<double>& x, double fs_hz, double lo_hz, double hi_hz) {
    if (x.size() < 2) return 0.0;
    auto [freqs, power] = periodogram(x, fs_hz);
    double total = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        if (freqs[k] < lo_hz || freqs[k] > hi_hz) continue;
        total += power[k];
        peak = std::max(peak, power[k]);
    }
    return total > 0.0 ? peak / total : 0.0;
}

} // namespace somno
