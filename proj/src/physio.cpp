#include "somno/physio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "somno/dsp.hpp"
#include "somno/spectral.hpp"

namespace somno {

namespace {

constexpr double kHrBandLo = 0.75, kHrBandHi = 3.0;
constexpr double kRespBandLo = 0.1, kRespBandHi = 0.7;
constexpr double kPostureThresholdV = 0.05;

double population_variance(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mu) * (v - mu);
    return var / static_cast<double>(x.size());
}

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

bool all_nan(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isnan(v)) return false;
    return true;
}

// argmax bin of the periodogram restricted to [lo, hi]; NaN when the band is dead
double spectral_peak_hz(const std::vector<double>& x, double fs, double lo, double hi) {
    auto [freqs, power] = periodogram(x, fs);
    double best = -1.0, best_f = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        if (freqs[k] < lo || freqs[k] > hi) continue;
        if (power[k] > best) {
            best = power[k];
            best_f = freqs[k];
        }
    }
    return best > 0.0 ? best_f : std::numeric_limits<double>::quiet_NaN();
}

double band_power(const std::vector<double>& x, double fs, double lo, double hi) {
    auto [freqs, power] = periodogram(x, fs);
    double s = 0.0;
    for (std::size_t k = 0; k < freqs.size(); ++k)
        if (freqs[k] >= lo && freqs[k] <= hi) s += power[k];
    return s;
}

// Local maxima filtered by topographic prominence and min separation
// (taller peaks claim their neighborhood first).
std::vector<std::size_t> find_peaks(const std::vector<double>& x, double min_prominence,
                                    std::size_t min_distance) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) candidates.push_back(i);

    std::vector<std::size_t> prominent;
    for (std::size_t p : candidates) {
        double left_min = x[p];
        for (std::size_t i = p; i-- > 0;) {
            if (x[i] > x[p]) break;
            left_min = std::min(left_min, x[i]);
        }
        double right_min = x[p];
        for (std::size_t i = p + 1; i < x.size(); ++i) {
            if (x[i] > x[p]) break;
            right_min = std::min(right_min, x[i]);
        }
        if (x[p] - std::max(left_min, right_min) >= min_prominence) prominent.push_back(p);
    }

    std::vector<std::size_t> order(prominent.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[prominent[a]] > x[prominent[b]]; });

    std::vector<bool> keep(prominent.size(), true);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (!keep[i]) continue;
        for (std::size_t j = 0; j < prominent.size(); ++j) {
            if (j == i || !keep[j]) continue;
            const std::size_t d = prominent[i] > prominent[j] ? prominent[i] - prominent[j]
                                                              : prominent[j] - prominent[i];
            if (d < min_distance && x[prominent[j]] <= x[prominent[i]]) keep[j] = false;
        }
    }

    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < prominent.size(); ++i)
        if (keep[i]) out.push_back(prominent[i]);
    std::sort(out.begin(), out.end());
    return out;
}

struct WindowEstimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    double quality = 0.0;
};

WindowEstimate hr_from_window(const std::array<std::vector<double>, 3>& win, double fs,
                              const HrOptions& opts) {
    WindowEstimate est;

    const std::vector<double>* selected = nullptr;
    Pca3Decomposition pca;
    std::array<double, 3> scores{};

    switch (opts.mode) {
        case HrMode::Full: {
            pca = pca3(win);
            for (int i = 0; i < 3; ++i) scores[i] = periodicity(pca.components[i], fs, kHrBandLo, kHrBandHi);
            const int best = static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
            selected = &pca.components[best];
            est.quality = scores[best];
            break;
        }
        case HrMode::NoPcaBestPatch: {
            for (int i = 0; i < 3; ++i) scores[i] = periodicity(win[i], fs, kHrBandLo, kHrBandHi);
            const int best = static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
            selected = &win[best];
            est.quality = scores[best];
            break;
        }
        case HrMode::NoPcaPressedPatch: {
            selected = &win[opts.pressed_patch];
            est.quality = periodicity(*selected, fs, kHrBandLo, kHrBandHi);
            break;
        }
    }

    const double f_pulse = spectral_peak_hz(*selected, fs, kHrBandLo, kHrBandHi);
    if (std::isnan(f_pulse)) {
        est.quality = 0.0;
        return est;
    }
    est.value = 60.0 * f_pulse;
    return est;
}

RateSeries estimate_heart_rate_impl(const std::array<std::vector<double>, 3>& bcg, double fs_hz,
                                    const HrOptions& opts, bool parallel) {
    if (opts.pressed_patch < 0 || opts.pressed_patch > 2)
        throw std::invalid_argument("heart rate: pressed patch index must be 0..2");
    const auto win_len = static_cast<std::size_t>(std::llround(30.0 * fs_hz));
    const auto hop = static_cast<std::size_t>(std::llround(10.0 * fs_hz));
    const std::size_t n = bcg[0].size();
    if (bcg[1].size() != n || bcg[2].size() != n)
        throw std::invalid_argument("heart rate: channel length mismatch");
    if (n < win_len) throw std::invalid_argument("heart rate: need at least 30 s of data");

    // Filter whole channels once; NaN masks are kept so dead windows stay NaN.
    const FilterSpec bp = design_butterworth_bandpass(5, kHrBandLo, kHrBandHi, fs_hz);
    std::array<std::vector<double>, 3> filtered;
    std::array<std::vector<char>, 3> nan_mask;
    for (int c = 0; c < 3; ++c) {
        nan_mask[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) nan_mask[c][i] = std::isnan(bcg[c][i]) ? 1 : 0;
        if (all_nan(bcg[c]))
            filtered[c].assign(n, 0.0);
        else
            filtered[c] = filtfilt(bp, interpolate_nans(bcg[c]));
    }

    const std::size_t n_windows = (n - win_len) / hop + 1;
    RateSeries series(n_windows);

    const auto windows = static_cast<std::ptrdiff_t>(n_windows);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t w = 0; w < windows; ++w) {
        const std::size_t start = static_cast<std::size_t>(w) * hop;
        RatePoint pt;
        pt.time_s = (static_cast<double>(start) + static_cast<double>(win_len) / 2.0) / fs_hz;
        pt.value = std::numeric_limits<double>::quiet_NaN();

        bool usable = false;
        std::array<std::vector<double>, 3> slice;
        for (int c = 0; c < 3; ++c) {
            slice[c].assign(filtered[c].begin() + start, filtered[c].begin() + start + win_len);
            bool any_live = false;
            for (std::size_t i = start; i < start + win_len; ++i)
                if (!nan_mask[c][i]) { any_live = true; break; }
            usable = usable || any_live;
        }
        if (usable) {
            const auto est = hr_from_window(slice, fs_hz, opts);
            pt.value = est.value;
            pt.quality = est.quality;
        }
        series[w] = pt;
    }
    return series;
}

} // namespace

HrMode hr_mode_from_name(const std::string& name) {
    if (name == "full") return HrMode::Full;
    if (name == "no-pca-best") return HrMode::NoPcaBestPatch;
    if (name == "no-pca-pressed") return HrMode::NoPcaPressedPatch;
    throw std::invalid_argument("unknown heart-rate mode '" + name + "'");
}

const char* to_string(HrMode m) {
    switch (m) {
        case HrMode::Full: return "full";
        case HrMode::NoPcaBestPatch: return "no-pca-best";
        case HrMode::NoPcaPressedPatch: return "no-pca-pressed";
    }
    return "?";
}

const char* to_string(Posture p) {
    switch (p) {
        case Posture::Back: return "back";
        case Posture::Left: return "left";
        case Posture::Right: return "right";
        case Posture::Indeterminate: return "indeterminate";
    }
    return "?";
}

const char* to_string(MovementSeverity s) {
    return s == MovementSeverity::Major ? "major" : "minor";
}

Pca3Decomposition pca3(const std::array<std::vector<double>, 3>& window) {
    const std::size_t m = window[0].size();
    if (window[1].size() != m || window[2].size() != m)
        throw std::invalid_argument("pca3: channel length mismatch");
    if (m < 3) throw std::invalid_argument("pca3: need at least 3 samples");

    Pca3Decomposition out;

    std::array<std::vector<double>, 3> centered;
    for (int c = 0; c < 3; ++c) {
        centered[c] = window[c];
        const double mu = mean_of(centered[c]);
        for (double& v : centered[c]) v -= mu;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) s += centered[i][t] * centered[j][t];
            out.sigma[i][j] = out.sigma[j][i] = s / static_cast<double>(m - 1);
        }

    // cyclic Jacobi on a copy of sigma; V accumulates the rotations
    std::array<std::array<double, 3>, 3> a = out.sigma;
    std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    double norm = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) norm += a[i][j] * a[i][j];
    const double tol = 1e-12 * std::max(norm, 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off <= tol) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
    for (int c = 0; c < 3; ++c) {
        out.lambda[c] = a[order[c]][order[c]];
        for (int r = 0; r < 3; ++r) out.phi[r][c] = v[r][order[c]];
        // deterministic sign: largest-magnitude entry positive
        int arg = 0;
        for (int r = 1; r < 3; ++r)
            if (std::abs(out.phi[r][c]) > std::abs(out.phi[arg][c])) arg = r;
        if (out.phi[arg][c] < 0.0)
            for (int r = 0; r < 3; ++r) out.phi[r][c] = -out.phi[r][c];
    }

    for (int c = 0; c < 3; ++c) {
        out.components[c].resize(m);
        for (std::size_t t = 0; t < m; ++t)
            out.components[c][t] = out.phi[0][c] * centered[0][t] + out.phi[1][c] * centered[1][t] +
                                   out.phi[2][c] * centered[2][t];
    }
    return out;
}

RateSeries estimate_heart_rate(const std::array<std::vector<double>, 3>& bcg, double fs_hz,
                               const HrOptions& opts) {
    return estimate_heart_rate_impl(bcg, fs_hz, opts, true);
}

RateSeries estimate_heart_rate_serial(const std::array<std::vector<double>, 3>& bcg, double fs_hz,
                                      const HrOptions& opts) {
    return estimate_heart_rate_impl(bcg, fs_hz, opts, false);
}

RateSeries estimate_respiration(const std::array<std::vector<double>, 3>& slow, double fs_hz) {
    const auto win_len = static_cast<std::size_t>(std::llround(60.0 * fs_hz));
    const auto hop = static_cast<std::size_t>(std::llround(30.0 * fs_hz));
    const std::size_t n = slow[0].size();
    if (slow[1].size() != n || slow[2].size() != n)
        throw std::invalid_argument("respiration: channel length mismatch");
    if (n < win_len) return {};

    RateSeries series;
    for (std::size_t start = 0; start + win_len <= n; start += hop) {
        RatePoint pt;
        pt.time_s = (static_cast<double>(start) + static_cast<double>(win_len) / 2.0) / fs_hz;
        pt.value = std::numeric_limits<double>::quiet_NaN();

        std::array<std::vector<double>, 3> win;
        bool usable = false;
        for (int c = 0; c < 3; ++c) {
            win[c].assign(slow[c].begin() + start, slow[c].begin() + start + win_len);
            if (!all_nan(win[c])) {
                usable = true;
                win[c] = interpolate_nans(std::move(win[c]));
            } else {
                win[c].assign(win_len, 0.0);
            }
        }
        if (!usable) {
            series.push_back(pt);
            continue;
        }

        int best_patch = 0;
        double best_power = -1.0;
        for (int c = 0; c < 3; ++c) {
            const double p = band_power(win[c], fs_hz, kRespBandLo, kRespBandHi);
            if (p > best_power) {
                best_power = p;
                best_patch = c;
            }
        }

        const double f_peak = spectral_peak_hz(win[best_patch], fs_hz, kRespBandLo, kRespBandHi);
        if (std::isnan(f_peak)) {
            series.push_back(pt);
            continue;
        }

        const double lo = std::max(0.08, 0.6 * f_peak);
        const double hi = 1.4 * f_peak;
        const auto filtered = filtfilt(design_butterworth_bandpass(3, lo, hi, fs_hz), win[best_patch]);

        const double sigma = std::sqrt(population_variance(filtered));
        const auto min_dist = static_cast<std::size_t>(std::llround(0.5 / f_peak * fs_hz));
        const auto peaks = find_peaks(filtered, 0.5 * sigma, std::max<std::size_t>(min_dist, 1));

        pt.value = static_cast<double>(peaks.size());
        pt.quality = periodicity(win[best_patch], fs_hz, kRespBandLo, kRespBandHi);
        series.push_back(pt);
    }
    return series;
}

BaselineCalibration calibrate_seated_baseline(const Recording& rec) {
    const double duration = static_cast<double>(rec.slow_len()) / rec.slow_rate.hz();
    if (duration < 30.0)
        throw std::invalid_argument("calibration needs at least 30 s of seated data");

    BaselineCalibration calib;
    for (int c = 0; c < kNumSlowChannels; ++c) {
        const auto x = interpolate_nans(rec.slow[c]);
        calib.seated_mean_v[c] = mean_of(x);
        calib.stationary_variance[c] = population_variance(x);
    }
    return calib;
}

std::vector<PostureBlock> classify_posture(const Recording& rec, const BaselineCalibration& calib) {
    const double fs = rec.slow_rate.hz();
    const double duration = static_cast<double>(rec.slow_len()) / fs;
    const auto n_blocks = static_cast<std::size_t>(std::floor(duration / 10.0));

    std::array<std::vector<double>, 3> clean;
    for (int c = 0; c < 3; ++c) clean[c] = interpolate_nans(rec.slow[c]);

    std::vector<PostureBlock> out;
    out.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto lo = static_cast<std::size_t>(std::llround(static_cast<double>(b) * 10.0 * fs));
        const auto hi = std::min(rec.slow_len(),
                                 static_cast<std::size_t>(std::llround(static_cast<double>(b + 1) * 10.0 * fs)));
        PostureBlock block;
        block.time_s = static_cast<double>(b) * 10.0;

        std::array<double, 3> delta{};
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) s += clean[c][i];
            delta[c] = calib.seated_mean_v[c] - s / static_cast<double>(hi - lo);
        }
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (delta[c] > delta[best]) best = c;  // strict >: ties keep the earlier patch
        block.max_delta_v = delta[best];
        block.posture = delta[best] >= kPostureThresholdV
                            ? static_cast<Posture>(best)  // P1=Back, P2=Left, P3=Right
                            : Posture::Indeterminate;
        out.push_back(block);
    }
    return out;
}

std::vector<MovementEvent> detect_movement(const Recording& rec, const BaselineCalibration& calib) {
    const double fs = rec.slow_rate.hz();
    const double duration = static_cast<double>(rec.slow_len()) / fs;

    std::array<std::vector<double>, 3> clean;
    for (int c = 0; c < 3; ++c) clean[c] = interpolate_nans(rec.slow[c]);

    struct Block {
        double start_s, end_s;
        bool major;
    };
    std::vector<Block> fired;
    for (double start = 0.0; start + 2.0 <= duration + 1e-9; start += 1.0) {
        const auto lo = static_cast<std::size_t>(std::llround(start * fs));
        const auto hi = std::min(rec.slow_len(), static_cast<std::size_t>(std::llround((start + 2.0) * fs)));
        if (hi <= lo + 1) break;

        bool fires = false, major = false;
        for (int c = 0; c < 3; ++c) {
            std::vector<double> block(clean[c].begin() + lo, clean[c].begin() + hi);
            const double var = population_variance(block);
            if (var > 0.0 && var >= 5.0 * calib.stationary_variance[c]) {
                fires = true;
                if (var >= 25.0 * calib.stationary_variance[c]) major = true;
            }
        }
        if (fires) fired.push_back({start, start + 2.0, major});
    }

    std::vector<MovementEvent> events;
    for (const auto& b : fired) {
        if (!events.empty() && b.start_s <= events.back().interval.end_s) {
            events.back().interval.end_s = b.end_s;
            if (b.major) events.back().severity = MovementSeverity::Major;
        } else {
            MovementEvent ev;
            ev.interval = {EventKind::Movement, b.start_s, b.end_s};
            ev.severity = b.major ? MovementSeverity::Major : MovementSeverity::Minor;
            events.push_back(ev);
        }
    }
    return events;
}

} // namespace somno
