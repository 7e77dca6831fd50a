// Acceptance suite: exercises every headline requirement end to end against
// the synthetic-signal oracle and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "somno/acquisition.hpp"
#include "somno/dsp.hpp"
#include "somno/metrics.hpp"
#include "somno/microevent.hpp"
#include "somno/physio.hpp"
#include "somno/rng.hpp"
#include "somno/spectral.hpp"
#include "somno/synth.hpp"

using namespace somno;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool passed, const std::string& detail) {
    std::printf("[%s] criterion %d: %-28s %s\n", passed ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!passed) ++g_failures;
}

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<double> gaussian_vec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (double& v : x) v = rng.gaussian();
    return x;
}

// ten 5-minute scenarios cycling through the three gain/posture profiles
std::vector<synth::ScenarioSpec> hr_suite() {
    std::vector<synth::ScenarioSpec> suite;
    for (int i = 0; i < 10; ++i) {
        synth::ScenarioSpec spec;
        spec.duration_s = 300.0;
        spec.seed = 1000 + static_cast<std::uint64_t>(i);
        spec.hr_bpm = {{0.0, 50.0 + 5.5 * i}};
        spec.snr_bcg_db = 0.0;
        spec.motion_disturbance = 3.5;  // heavy common-mode motion: the PCA step has work to do
        switch (i % 3) {
            case 0:
                spec.gain_profile = synth::GainProfile::Pressed;
                spec.posture = {{0.0, Posture::Back}};
                break;
            case 1:
                spec.gain_profile = synth::GainProfile::Pressed;
                spec.posture = {{0.0, Posture::Left}};
                break;
            case 2:  // the temple-dominant case: pressed patch is NOT the best
                spec.gain_profile = synth::GainProfile::Temple;
                spec.posture = {{0.0, Posture::Back}};
                break;
        }
        suite.push_back(spec);
    }
    return suite;
}

int pressed_patch_of(const synth::ScenarioSpec& spec) {
    switch (spec.posture.front().posture) {
        case Posture::Back: return 0;
        case Posture::Left: return 1;
        case Posture::Right: return 2;
        default: return 0;
    }
}

std::vector<double> hr_errors(const synth::ScenarioSpec& spec, HrMode mode, double* runtime_s) {
    const auto bcg = synth::gen_bcg(spec);
    const std::array<std::vector<double>, 3> ch = {bcg.ch[0].mixed(), bcg.ch[1].mixed(),
                                                   bcg.ch[2].mixed()};
    HrOptions opts;
    opts.mode = mode;
    opts.pressed_patch = pressed_patch_of(spec);
    const double t0 = now_s();
    const auto series = estimate_heart_rate(ch, 125.0, opts);
    if (runtime_s) *runtime_s = now_s() - t0;

    std::vector<double> errors;
    for (const auto& p : series)
        if (!std::isnan(p.value))
            errors.push_back(std::abs(p.value - synth::piecewise_linear(spec.hr_bpm, p.time_s)));
    return errors;
}

void criterion_1_and_2() {
    const auto suite = hr_suite();
    std::vector<double> all_errors;
    double worst_runtime = 0.0;
    std::vector<double> mean_full, mean_best, mean_pressed;
    for (const auto& spec : suite) {
        double runtime = 0.0;
        const auto errs = hr_errors(spec, HrMode::Full, &runtime);
        worst_runtime = std::max(worst_runtime, runtime);
        all_errors.insert(all_errors.end(), errs.begin(), errs.end());
        mean_full.push_back(mean(errs));
        mean_best.push_back(mean(hr_errors(spec, HrMode::NoPcaBestPatch, nullptr)));
        mean_pressed.push_back(mean(hr_errors(spec, HrMode::NoPcaPressedPatch, nullptr)));
    }

    const double med = median(all_errors);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "median |err| %.3f bpm (<= 2), slowest scenario %.2f s (< 5)",
                  med, worst_runtime);
    criterion(1, "heart rate", med <= 2.0 && worst_runtime < 5.0, detail);

    const double m_full = mean(mean_full);
    const double m_best = mean(mean_best);
    const double m_pressed = mean(mean_pressed);
    std::snprintf(detail, sizeof(detail),
                  "mean err: full %.3f < no-pca-best %.3f; no-pca-best < no-pca-pressed %.3f + 1.5",
                  m_full, m_best, m_pressed);
    criterion(2, "hr ablation ordering", m_full < m_best && m_best < m_pressed + 1.5, detail);
}

void criterion_3_respiration() {
    std::vector<double> all_errors;
    for (int i = 0; i < 6; ++i) {
        synth::ScenarioSpec spec;
        spec.duration_s = 300.0;
        spec.seed = 2000 + static_cast<std::uint64_t>(i);
        spec.resp_bpm = {{0.0, 10.0 + 4.0 * i}};  // 10..30
        spec.snr_resp_db = 0.0;
        const auto slow = synth::gen_slow(spec);
        const std::array<std::vector<double>, 3> ch = {slow.ch[0].mixed(), slow.ch[1].mixed(),
                                                       slow.ch[2].mixed()};
        for (const auto& p : estimate_respiration(ch, 125.0 / 3.0))
            if (!std::isnan(p.value))
                all_errors.push_back(std::abs(p.value - spec.resp_bpm.front().value));
    }
    const double med = median(all_errors);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "median |err| %.3f breaths/min (<= 1)", med);
    criterion(3, "respiration", med <= 1.0, detail);
}

void criterion_4_posture() {
    std::size_t blocks_total = 0, blocks_correct = 0;
    for (int i = 0; i < 3; ++i) {
        synth::ScenarioSpec spec;
        spec.duration_s = 240.0;
        spec.seed = 3000 + static_cast<std::uint64_t>(i);
        spec.posture = {{0.0, Posture::Back}, {80.0, Posture::Left}, {160.0, Posture::Right}};
        const auto rec = synth::gen_recording(spec);
        const auto calib = synth::seated_calibration(spec);
        for (const auto& b : classify_posture(rec, calib)) {
            ++blocks_total;
            blocks_correct += b.posture == synth::posture_at(spec.posture, b.time_s + 5.0);
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%zu/%zu blocks correct (need 100%%)", blocks_correct,
                  blocks_total);
    criterion(4, "posture", blocks_total > 0 && blocks_correct == blocks_total, detail);
}

struct NightSet {
    FeatureMatrix train;
    FeatureMatrix test;
    std::size_t injected = 0;
};

NightSet build_nights(EventKind kind, double spacing_s, std::uint64_t seed_base) {
    const FilterSpec bp = design_butterworth_bandpass(5, 0.5, 35.0, 125.0);
    const auto win = static_cast<std::size_t>(std::llround(125.0));

    NightSet set;
    for (int night = 0; night < 5; ++night) {
        synth::ScenarioSpec spec;
        spec.duration_s = 600.0;
        spec.seed = seed_base + static_cast<std::uint64_t>(night);
        for (double t = 5.0; t + 4.0 < spec.duration_s; t += spacing_s)
            spec.events.push_back({kind, t, 0.0, 0.0});
        set.injected += spec.events.size();

        const auto gen = synth::gen_eeg(spec);
        const auto filtered = filtfilt(bp, gen.ch[0].mixed());
        const auto ac = build_feature_channels(filtered, 125.0, kind);
        auto fm = window_statistics(ac);
        fm.labels = window_truth_labels(gen.events, kind, fm.rows.size(), 125.0, win, 31);

        auto& target = night < 4 ? set.train : set.test;
        if (target.rows.empty()) {
            target = fm;
        } else {
            target.rows.insert(target.rows.end(), fm.rows.begin(), fm.rows.end());
            target.labels.insert(target.labels.end(), fm.labels.begin(), fm.labels.end());
        }
    }
    set.injected = set.injected * 4 / 5;  // report the training-night count
    return set;
}

void criterion_5_microevents() {
    const double t0 = now_s();
    bool ok = true;
    char detail[240];
    std::string parts;
    for (EventKind kind : {EventKind::Spindle, EventKind::KComplex}) {
        const bool spindle = kind == EventKind::Spindle;
        const auto set = build_nights(kind, spindle ? 11.0 : 15.0, spindle ? 4000 : 5000);

        const auto balanced = smote_balance(set.train, 5, 42);
        const auto model = train_forest(balanced, 100, 42);
        const auto preds = predict(model, set.test);
        std::vector<int> labels(preds.size());
        for (std::size_t i = 0; i < preds.size(); ++i) labels[i] = preds[i].label;
        const auto scores = evaluate_detector(labels, set.test.labels);

        const bool kind_ok = scores.sensitivity >= 0.75 && scores.specificity >= 0.80;
        ok = ok && kind_ok;
        char part[120];
        std::snprintf(part, sizeof(part), "%s: %zu injected, sens %.3f spec %.3f; ",
                      to_string(kind), set.injected, scores.sensitivity, scores.specificity);
        parts += part;
    }
    const double elapsed = now_s() - t0;
    ok = ok && elapsed < 600.0;
    std::snprintf(detail, sizeof(detail), "%sruntime %.1f s (< 600)", parts.c_str(), elapsed);
    criterion(5, "microevent detection", ok, detail);
}

void criterion_6_kernels() {
    bool ok = true;
    std::string notes;

    // Butterworth -3 dB points within 2%
    for (const auto& band : {std::pair{0.75, 3.0}, std::pair{0.5, 35.0}}) {
        const auto spec = design_butterworth_bandpass(5, band.first, band.second, 125.0);
        const double target = std::numbers::sqrt2 / 2.0;
        ok = ok && std::abs(spec.magnitude_at(band.first) - target) <= 0.02 * target;
        ok = ok && std::abs(spec.magnitude_at(band.second) - target) <= 0.02 * target;
    }

    // DWT perfect reconstruction and energy conservation at 1e-10
    {
        const auto x = gaussian_vec(512, 60);
        const auto d = dwt2_db2(x);
        const auto back = idwt2_db2(d);
        double err = 0.0, ex = 0.0, ec = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            err += (x[i] - back[i]) * (x[i] - back[i]);
            ex += x[i] * x[i];
        }
        for (double v : d.ca2) ec += v * v;
        for (double v : d.cd2) ec += v * v;
        for (double v : d.cd1) ec += v * v;
        ok = ok && std::sqrt(err / 512.0) <= 1e-10;
        ok = ok && std::abs(ex - ec) <= 1e-10 * ex;
    }

    // EMD reconstruction and the IMF counting invariant
    {
        std::vector<double> x(2000);
        Rng rng(61);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = std::sin(0.06 * static_cast<double>(i)) + 0.4 * rng.gaussian();
        const auto d = emd(x);
        std::vector<double> sum = d.residue;
        for (const auto& imf : d.imfs)
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += imf[i];
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) err += (x[i] - sum[i]) * (x[i] - sum[i]);
        ok = ok && std::sqrt(err / static_cast<double>(x.size())) <= 1e-8;
        for (const auto& imf : d.imfs) {
            const auto ext = static_cast<std::ptrdiff_t>(count_interior_extrema(imf));
            const auto zc = static_cast<std::ptrdiff_t>(count_zero_crossings(imf));
            ok = ok && std::abs(ext - zc) <= 1;
        }
    }

    // PCA eigen identity residual <= 1e-8
    {
        std::array<std::vector<double>, 3> w = {gaussian_vec(2000, 62), gaussian_vec(2000, 63),
                                                gaussian_vec(2000, 64)};
        for (std::size_t i = 0; i < 2000; ++i) w[2][i] = 0.5 * w[0][i] + 0.5 * w[2][i];
        const auto p = pca3(w);
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r) {
                double lhs = 0.0;
                for (int k = 0; k < 3; ++k) lhs += p.sigma[r][k] * p.phi[k][c];
                ok = ok && std::abs(lhs - p.lambda[c] * p.phi[r][c]) <= 1e-8;
            }
    }

    // periodogram Parseval <= 1e-6 relative
    {
        const auto x = gaussian_vec(3750, 65);
        auto [freqs, power] = periodogram(x, 125.0);
        double total = 0.0;
        for (double p : power) total += p;
        double mu = 0.0;
        for (double v : x) mu += v;
        mu /= static_cast<double>(x.size());
        double var = 0.0;
        for (double v : x) var += (v - mu) * (v - mu);
        var /= static_cast<double>(x.size());
        ok = ok && std::abs(total - var) <= 1e-6 * var;
    }

    criterion(6, "numerical kernels", ok, "butterworth edges, dwt, emd, pca, parseval");
}

void criterion_7_metric_oracles() {
    bool ok = true;
    Rng rng(70);

    // zncc against the literal formula
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.below(50);
        std::vector<double> f(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = rng.uniform(-3.0, 3.0);
            t[i] = rng.uniform(-3.0, 3.0);
        }
        double mu_f = 0.0, mu_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mu_f += f[i] / static_cast<double>(n);
            mu_t += t[i] / static_cast<double>(n);
        }
        double var_f = 0.0, var_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            var_f += (f[i] - mu_f) * (f[i] - mu_f) / static_cast<double>(n);
            var_t += (t[i] - mu_t) * (t[i] - mu_t) / static_cast<double>(n);
        }
        double expect = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            expect += (f[i] - mu_f) * (t[i] - mu_t) / (std::sqrt(var_f) * std::sqrt(var_t));
        expect /= static_cast<double>(n);
        ok = ok && std::abs(zncc(f, t) - expect) <= 1e-12;
    }

    // kappa against the literal formula
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + rng.below(100);
        std::vector<int> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.below(4));
            b[i] = static_cast<int>(rng.below(4));
        }
        double po = 0.0;
        for (std::size_t i = 0; i < n; ++i) po += a[i] == b[i] ? 1.0 / static_cast<double>(n) : 0.0;
        double pe = 0.0;
        for (int c = 0; c < 4; ++c) {
            double na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                na += a[i] == c;
                nb += b[i] == c;
            }
            pe += (na / static_cast<double>(n)) * (nb / static_cast<double>(n));
        }
        ok = ok && std::abs(cohens_kappa(a, b, 4) - (po - pe) / (1.0 - pe)) <= 1e-12;
    }

    // per-class scores against the direct count formulas
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30 + rng.below(100);
        std::vector<int> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng.below(3));
            pred[i] = static_cast<int>(rng.below(3));
        }
        const auto [cm, scores] = confusion_and_scores(truth, pred, {"a", "b", "c"});
        for (int c = 0; c < 3; ++c) {
            double tp = 0, fp = 0, fn = 0, tn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool t = truth[i] == c, p = pred[i] == c;
                tp += t && p;
                fp += !t && p;
                fn += t && !p;
                tn += !t && !p;
            }
            const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
            const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
            const double f1 = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
            ok = ok && std::abs(scores[c].precision - precision) <= 1e-12;
            ok = ok && std::abs(scores[c].recall - recall) <= 1e-12;
            ok = ok && std::abs(scores[c].f1 - f1) <= 1e-12;
            ok = ok && std::abs(scores[c].accuracy - (tp + tn) / static_cast<double>(n)) <= 1e-12;
        }
    }

    // coherence of a delayed copy
    {
        const auto x = gaussian_vec(60 * 125, 71);
        std::vector<double> y(x.size(), 0.0);
        for (std::size_t i = 7; i < x.size(); ++i) y[i] = x[i - 7];
        const auto report = msc_coherence(x, y, 125.0);
        for (const auto& band : report.bands) ok = ok && band.mean >= 0.99;
    }

    // label thresholds bit-exact
    ok = ok && coherence_label(std::nextafter(0.2, 0.0)) == CoherenceLabel::None;
    ok = ok && coherence_label(0.2) == CoherenceLabel::Low;
    ok = ok && coherence_label(std::nextafter(0.3, 0.0)) == CoherenceLabel::Low;
    ok = ok && coherence_label(0.3) == CoherenceLabel::Medium;
    ok = ok && coherence_label(std::nextafter(0.4, 0.0)) == CoherenceLabel::Medium;
    ok = ok && coherence_label(0.4) == CoherenceLabel::High;
    ok = ok && coherence_label(std::nextafter(0.5, 0.0)) == CoherenceLabel::High;
    ok = ok && coherence_label(0.5) == CoherenceLabel::VeryHigh;
    ok = ok && coherence_label(1.0) == CoherenceLabel::VeryHigh;

    criterion(7, "metric oracles", ok, "zncc/kappa/f1 vs brute force, coherence, label bounds");
}

void criterion_8_codec() {
    bool ok = true;
    std::string note;

    // check value
    const char* digits = "123456789";
    ok = ok && crc16_ccitt_false(reinterpret_cast<const std::uint8_t*>(digits), 9) == 0x29B1;

    // decode(encode) identity on 1000 random recordings
    Rng rng(80);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const std::size_t ticks = 1 + rng.below(300);
        Recording rec;
        for (auto& ch : rec.fast) {
            ch.resize(ticks);
            for (double& v : ch) v = static_cast<double>(rng.below(4096)) * rec.adc_scale;
        }
        for (auto& ch : rec.slow) {
            ch.resize((ticks + 2) / 3);
            for (double& v : ch) v = static_cast<double>(rng.below(4096)) * rec.adc_scale;
        }
        const auto [back, report] = decode_stream(encode_frames(rec));
        ok = ok && report.frames_lost == 0 && report.frames_corrupt == 0;
        ok = ok && back.fast_len() == rec.fast_len();
        for (int c = 0; c < kNumFastChannels && ok; ++c)
            for (std::size_t i = 0; i < ticks; ++i)
                if (std::llround(back.fast[c][i] / back.adc_scale) !=
                    std::llround(rec.fast[c][i] / rec.adc_scale)) {
                    ok = false;
                    break;
                }
    }
    if (!ok) note += "round-trip failed; ";

    // fuzz: one million arbitrary streams, zero crashes
    std::uint64_t crashes = 0;
    {
        Rng fuzz(81);
        // a template valid stream to mutate
        Recording rec;
        for (auto& ch : rec.fast) ch.assign(50, 0.5);
        for (auto& ch : rec.slow) ch.assign(17, 0.5);
        const auto valid = encode_frames(rec);

        for (std::uint64_t trial = 0; trial < 1000000; ++trial) {
            std::vector<std::uint8_t> stream;
            if (trial % 10 == 0) {  // mutated valid stream
                stream = valid;
                const std::size_t flips = 1 + fuzz.below(8);
                for (std::size_t f = 0; f < flips; ++f)
                    stream[fuzz.below(stream.size())] ^= static_cast<std::uint8_t>(1 + fuzz.below(255));
            } else {  // raw garbage
                stream.resize(fuzz.below(48));
                for (auto& b : stream) b = static_cast<std::uint8_t>(fuzz.next_u64());
            }
            try {
                const auto [dec, report] = decode_stream(stream);
                (void)report;
            } catch (...) {
                ++crashes;
            }
        }
    }
    ok = ok && crashes == 0;

    // single-frame drop accounting (every interior drop position)
    {
        Rng r2(82);
        Recording rec;
        for (auto& ch : rec.fast) {
            ch.resize(125);
            for (double& v : ch) v = static_cast<double>(r2.below(4096)) * rec.adc_scale;
        }
        for (auto& ch : rec.slow) {
            ch.resize(42);
            for (double& v : ch) v = static_cast<double>(r2.below(4096)) * rec.adc_scale;
        }
        const auto bytes = encode_frames(rec);
        std::vector<std::size_t> offsets;
        std::size_t pos = 0;
        while (pos < bytes.size()) {
            offsets.push_back(pos);
            pos += 4 + 16 * bytes[pos + 3] + 2;
        }
        for (std::size_t drop = 1; drop + 1 < offsets.size(); ++drop) {
            std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + offsets[drop]);
            cut.insert(cut.end(), bytes.begin() + offsets[drop + 1], bytes.end());
            const auto [dec, report] = decode_stream(cut);
            ok = ok && report.frames_lost == 1;
            ok = ok && report.samples_lost == bytes[offsets[drop] + 3];
            ok = ok && dec.fast_len() == rec.fast_len();
        }
    }

    char detail[120];
    std::snprintf(detail, sizeof(detail), "%scrc 0x29B1 ok, 10^6 fuzz streams, %llu crashes",
                  note.c_str(), static_cast<unsigned long long>(crashes));
    criterion(8, "acquisition codec", ok, detail);
}

void criterion_9_smote_forest() {
    bool ok = true;
    Rng rng(90);

    for (int trial = 0; trial < 100 && ok; ++trial) {
        const std::size_t dims = 4 + rng.below(12);
        const std::size_t majority = 30 + rng.below(40);
        const std::size_t minority = 6 + rng.below(majority - 6 > 20 ? 15 : majority - 7);

        FeatureMatrix fm;
        fm.kind = EventKind::Spindle;
        fm.schema_hash = trial;  // schema is irrelevant to SMOTE
        std::vector<std::size_t> minority_rows;
        for (std::size_t i = 0; i < majority + minority; ++i) {
            const int label = i < majority ? 0 : 1;
            std::vector<double> row(dims);
            for (double& v : row) v = rng.gaussian() + (label ? 3.0 : 0.0);
            fm.rows.push_back(std::move(row));
            fm.labels.push_back(label);
            if (label == 1) minority_rows.push_back(i);
        }

        const auto out = smote_balance(fm, 5, 1234 + trial);
        std::size_t pos = 0, neg = 0;
        for (int l : out.labels) (l ? pos : neg)++;
        ok = ok && pos == neg && pos == majority;

        for (std::size_t i = fm.rows.size(); i < out.rows.size() && ok; ++i) {
            double best = 1e300;
            for (std::size_t a = 0; a < minority_rows.size(); ++a)
                for (std::size_t b = a + 1; b < minority_rows.size(); ++b) {
                    const auto& p = fm.rows[minority_rows[a]];
                    const auto& q = fm.rows[minority_rows[b]];
                    double qp2 = 0.0, dot = 0.0;
                    for (std::size_t c = 0; c < dims; ++c) {
                        qp2 += (q[c] - p[c]) * (q[c] - p[c]);
                        dot += (out.rows[i][c] - p[c]) * (q[c] - p[c]);
                    }
                    const double u = qp2 > 0.0 ? std::clamp(dot / qp2, 0.0, 1.0) : 0.0;
                    double d2 = 0.0;
                    for (std::size_t c = 0; c < dims; ++c) {
                        const double proj = p[c] + u * (q[c] - p[c]);
                        d2 += (out.rows[i][c] - proj) * (out.rows[i][c] - proj);
                    }
                    best = std::min(best, std::sqrt(d2));
                }
            ok = ok && best <= 1e-9;
        }
    }

    // forest determinism under a fixed seed
    {
        FeatureMatrix fm;
        fm.kind = EventKind::Spindle;
        fm.schema_hash = 7;
        Rng blob_rng(91);
        for (std::size_t i = 0; i < 200; ++i) {
            const int label = i % 2;
            std::vector<double> row(10);
            for (double& v : row) v = blob_rng.gaussian() + (label ? 2.0 : -2.0);
            fm.rows.push_back(std::move(row));
            fm.labels.push_back(label);
        }
        const auto a = train_forest(fm, 60, 555);
        const auto b = train_forest(fm, 60, 555);
        const auto pa = predict(a, fm);
        const auto pb = predict(b, fm);
        for (std::size_t i = 0; i < pa.size(); ++i)
            ok = ok && pa[i].positive_fraction == pb[i].positive_fraction;
    }

    criterion(9, "smote + forest", ok, "parity/collinearity on 100 datasets, seeded determinism");
}

} // namespace

int main() {
    const double t0 = now_s();
    criterion_1_and_2();
    criterion_3_respiration();
    criterion_4_posture();
    criterion_5_microevents();
    criterion_6_kernels();
    criterion_7_metric_oracles();
    criterion_8_codec();
    criterion_9_smote_forest();
    std::printf("%d criterion(s) failed; total runtime %.1f s\n", g_failures, now_s() - t0);
    return g_failures == 0 ? 0 : 1;
}
