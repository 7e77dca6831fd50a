#include "somno/metrics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "somno/fft.hpp"

namespace somno {

namespace {

void mean_and_popstd(const std::vector<double>& x, double& mu, double& sigma) {
    mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mu) * (v - mu);
    sigma = std::sqrt(var / static_cast<double>(x.size()));
}

} // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (std::size_t c : row) n += c;
    return n;
}

const char* to_string(CoherenceLabel l) {
    switch (l) {
        case CoherenceLabel::None: return "none";
        case CoherenceLabel::Low: return "low";
        case CoherenceLabel::Medium: return "medium";
        case CoherenceLabel::High: return "high";
        case CoherenceLabel::VeryHigh: return "very_high";
    }
    return "?";
}

CoherenceLabel coherence_label(double value) {
    if (value < 0.2) return CoherenceLabel::None;
    if (value < 0.3) return CoherenceLabel::Low;
    if (value < 0.4) return CoherenceLabel::Medium;
    if (value < 0.5) return CoherenceLabel::High;
    return CoherenceLabel::VeryHigh;
}

double zncc(const std::vector<double>& f, const std::vector<double>& t) {
    if (f.size() != t.size()) throw std::invalid_argument("zncc: length mismatch");
    if (f.size() < 2) throw std::invalid_argument("zncc: need at least 2 samples");

    double mu_f, sigma_f, mu_t, sigma_t;
    mean_and_popstd(f, mu_f, sigma_f);
    mean_and_popstd(t, mu_t, sigma_t);
    if (sigma_f == 0.0 || sigma_t == 0.0)
        throw std::invalid_argument("zncc: constant input has zero standard deviation");

    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += (f[i] - mu_f) * (t[i] - mu_t);
    return s / (static_cast<double>(f.size()) * sigma_f * sigma_t);
}

CoherenceReport msc_coherence(const std::vector<double>& x, const std::vector<double>& y, double fs_hz) {
    if (x.size() != y.size()) throw std::invalid_argument("coherence: length mismatch");

    const auto seg_len = static_cast<std::size_t>(std::llround(4.0 * fs_hz));
    const std::size_t hop = seg_len / 2;
    if (seg_len < 8 || x.size() < seg_len) throw std::invalid_argument("coherence: input too short");
    const std::size_t n_segments = (x.size() - seg_len) / hop + 1;
    if (n_segments < 3)
        throw std::invalid_argument("coherence: need at least 3 Welch segments (8 s of data)");

    std::vector<double> window(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(seg_len)));

    const std::size_t n_bins = seg_len / 2 + 1;
    std::vector<double> gxx(n_bins, 0.0), gyy(n_bins, 0.0);
    std::vector<std::complex<double>> gxy(n_bins, {0.0, 0.0});

    std::vector<double> sx(seg_len), sy(seg_len);
    for (std::size_t s = 0; s < n_segments; ++s) {
        const std::size_t start = s * hop;
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < seg_len; ++i) {
            mx += x[start + i];
            my += y[start + i];
        }
        mx /= static_cast<double>(seg_len);
        my /= static_cast<double>(seg_len);
        for (std::size_t i = 0; i < seg_len; ++i) {
            sx[i] = (x[start + i] - mx) * window[i];
            sy[i] = (y[start + i] - my) * window[i];
        }
        auto fx = fft_real(sx);
        auto fy = fft_real(sy);
        for (std::size_t k = 0; k < n_bins; ++k) {
            gxx[k] += std::norm(fx[k]);
            gyy[k] += std::norm(fy[k]);
            gxy[k] += std::conj(fx[k]) * fy[k];
        }
    }

    CoherenceReport report;
    report.freqs_hz.resize(n_bins);
    report.coherence.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        report.freqs_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(seg_len);
        const double denom = gxx[k] * gyy[k];
        report.coherence[k] = denom > 0.0 ? std::norm(gxy[k]) / denom : 0.0;
    }

    report.bands = {CoherenceBand{"delta", 0.5, 4.0, 0.0, CoherenceLabel::None},
                    CoherenceBand{"theta", 4.0, 7.0, 0.0, CoherenceLabel::None},
                    CoherenceBand{"alpha", 8.0, 12.0, 0.0, CoherenceLabel::None},
                    CoherenceBand{"beta", 12.0, 25.0, 0.0, CoherenceLabel::None}};
    for (auto& band : report.bands) {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < n_bins; ++k) {
            if (report.freqs_hz[k] < band.lo_hz || report.freqs_hz[k] > band.hi_hz) continue;
            s += report.coherence[k];
            ++n;
        }
        band.mean = n ? s / static_cast<double>(n) : 0.0;
        band.label = coherence_label(band.mean);
    }
    return report;
}

double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_classes) {
    if (a.size() != b.size()) throw std::invalid_argument("kappa: length mismatch");
    if (a.empty()) throw std::invalid_argument("kappa: empty input");

    const auto n = static_cast<double>(a.size());
    std::vector<double> marg_a(n_classes, 0.0), marg_b(n_classes, 0.0);
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || a[i] >= n_classes || b[i] < 0 || b[i] >= n_classes)
            throw std::invalid_argument("kappa: label out of range");
        marg_a[a[i]] += 1.0;
        marg_b[b[i]] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    const double p_o = agree / n;
    double p_e = 0.0;
    for (int c = 0; c < n_classes; ++c) p_e += (marg_a[c] / n) * (marg_b[c] / n);
    if (p_e == 1.0)
        throw std::invalid_argument("kappa: undefined, both raters constant and identical");
    return (p_o - p_e) / (1.0 - p_e);
}

double cohens_kappa(const Hypnogram& a, const Hypnogram& b) {
    std::vector<int> la(a.stages.size()), lb(b.stages.size());
    for (std::size_t i = 0; i < a.stages.size(); ++i) la[i] = static_cast<int>(a.stages[i]);
    for (std::size_t i = 0; i < b.stages.size(); ++i) lb[i] = static_cast<int>(b.stages[i]);
    return cohens_kappa(la, lb, 4);
}

std::pair<ConfusionMatrix, std::vector<ClassScores>> confusion_and_scores(
    const std::vector<int>& truth, const std::vector<int>& predicted,
    const std::vector<std::string>& classes) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion_and_scores: length mismatch");
    if (truth.empty()) throw std::invalid_argument("confusion_and_scores: empty input");

    const auto k = static_cast<int>(classes.size());
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k)
            throw std::invalid_argument("confusion_and_scores: label out of range");
        ++cm.counts[truth[i]][predicted[i]];
    }

    const auto n = static_cast<double>(truth.size());
    std::vector<ClassScores> scores(k);
    for (int c = 0; c < k; ++c) {
        double tp = static_cast<double>(cm.counts[c][c]);
        double fn = 0.0, fp = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == c) continue;
            fn += static_cast<double>(cm.counts[c][j]);
            fp += static_cast<double>(cm.counts[j][c]);
        }
        const double tn = n - tp - fn - fp;
        ClassScores& s = scores[c];
        s.accuracy = (tp + tn) / n;
        s.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
        s.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
        s.f1 = (2.0 * tp + fp + fn) > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
        s.degenerate = (tp + fn) == 0.0 && (tp + fp) == 0.0;
    }
    return {std::move(cm), std::move(scores)};
}

} // namespace somno
