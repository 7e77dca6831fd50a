#include "somno/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "somno/dsp.hpp"
#include "somno/rng.hpp"

namespace somno::synth {

namespace {

constexpr double kFastRate = 125.0;
constexpr double kMidRailV = 1.65;
constexpr double kPulseAmpV = 0.1;
// wide enough that the fundamental clearly outweighs the second harmonic
// even at 45-60 bpm where the 0.75 Hz band edge bites
constexpr double kPulseSigmaS = 0.2;
constexpr double kEegBackgroundRmsV = 0.05;
constexpr double kRespAmpPressedV = 0.016;
constexpr double kRespAmpUnpressedV = 0.010;
constexpr double kRespAmpSeatedV = 0.012;
// pressed patch sits 0.3 V below the unpressed ones; unpressed patches ride
// slightly above their seated level (less ear pressure than when sitting)
constexpr double kPressedBaselineDropV = 0.28;
constexpr double kUnpressedBaselineRiseV = 0.02;
const std::array<double, 3> kSeatedBaselineV = {1.50, 1.52, 1.48};

double slow_rate() { return kFastRate / 3.0; }

std::size_t fast_len(const ScenarioSpec& s) {
    return static_cast<std::size_t>(std::llround(s.duration_s * kFastRate));
}

double power_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

std::vector<double> pink_noise(std::size_t n, Rng& rng) {
    // Kellet's economy pink filter over white Gaussian noise
    std::vector<double> out(n);
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = rng.gaussian();
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        out[i] = b0 + b1 + b2 + w * 0.1848;
    }
    return out;
}

void scale_to_power(std::vector<double>& x, double target_power) {
    // demean first so noise components never shift a channel's baseline
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= x.empty() ? 1.0 : static_cast<double>(x.size());
    for (double& v : x) v -= mu;
    const double p = power_of(x);
    if (p <= 0.0) return;
    const double g = std::sqrt(target_power / p);
    for (double& v : x) v *= g;
}

int pressed_patch(Posture p) {
    switch (p) {
        case Posture::Back: return 0;
        case Posture::Left: return 1;
        case Posture::Right: return 2;
        case Posture::Indeterminate: break;
    }
    return 0;
}

double pulse_gain(const ScenarioSpec& spec, Posture posture, int patch) {
    if (spec.gain_profile == GainProfile::Temple)
        return patch == 0 ? 0.3 : 1.0;
    return patch == pressed_patch(posture) ? 1.0 : 0.3;
}

// Events with concrete intervals, amplitudes and (for spindles) frequency,
// drawn deterministically from the scenario seed.
struct DrawnEvent {
    EventKind kind;
    double start_s, end_s;
    double amplitude;  // x background RMS (EEG) or variance multiple (movement)
    double freq_hz = 0.0;
};

std::vector<DrawnEvent> draw_events(const ScenarioSpec& spec) {
    Rng rng(derive_seed(spec.seed, "events"));
    std::vector<DrawnEvent> out;
    for (const auto& ev : spec.events) {
        DrawnEvent d;
        d.kind = ev.kind;
        d.start_s = ev.t_s;
        switch (ev.kind) {
            case EventKind::Spindle:
                d.end_s = ev.t_s + (ev.dur_s > 0.0 ? ev.dur_s : rng.uniform(0.5, 1.5));
                d.amplitude = rng.uniform(2.0, 4.0);
                d.freq_hz = rng.uniform(11.0, 14.0);
                break;
            case EventKind::KComplex:
                d.end_s = ev.t_s + (ev.dur_s > 0.0 ? ev.dur_s : 1.0);
                d.amplitude = rng.uniform(3.0, 5.0);
                break;
            case EventKind::Movement:
                d.end_s = ev.t_s + (ev.dur_s > 0.0 ? ev.dur_s : 3.0);
                d.amplitude = ev.scale;
                break;
        }
        out.push_back(d);
    }
    std::sort(out.begin(), out.end(), [](const DrawnEvent& a, const DrawnEvent& b) {
        return a.start_s < b.start_s;
    });
    return out;
}

void check_no_overlap(const std::vector<DrawnEvent>& events, EventKind a, EventKind b) {
    const DrawnEvent* prev = nullptr;
    for (const auto& ev : events) {
        if (ev.kind != a && ev.kind != b) continue;
        if (prev && ev.start_s < prev->end_s)
            throw std::invalid_argument("synth: requested events overlap near t=" +
                                        std::to_string(ev.start_s));
        prev = &ev;
    }
}

void add_noise_at_snr(Components& c, std::vector<double> raw_noise, double snr_db,
                      double fallback_signal_power) {
    double p_sig = power_of(c.signal);
    if (p_sig <= 0.0) p_sig = fallback_signal_power;
    const double p_target = p_sig / std::pow(10.0, snr_db / 10.0);
    scale_to_power(raw_noise, p_target);
    c.noise = std::move(raw_noise);
}

} // namespace

GainProfile gain_profile_from_name(const std::string& name) {
    if (name == "pressed") return GainProfile::Pressed;
    if (name == "temple") return GainProfile::Temple;
    throw std::invalid_argument("unknown gain profile '" + name + "'");
}

const char* to_string(GainProfile g) {
    return g == GainProfile::Temple ? "temple" : "pressed";
}

void ScenarioSpec::validate() const {
    if (!(duration_s > 0.0)) throw std::invalid_argument("scenario: duration must be positive");
    auto check_sorted = [](const auto& pts, const char* what) {
        if (pts.empty()) throw std::invalid_argument(std::string("scenario: empty ") + what);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double prev = [&] {
                if constexpr (requires { pts[i].start_s; }) return pts[i - 1].start_s;
                else return pts[i - 1].t_s;
            }();
            const double cur = [&] {
                if constexpr (requires { pts[i].start_s; }) return pts[i].start_s;
                else return pts[i].t_s;
            }();
            if (cur < prev) throw std::invalid_argument(std::string("scenario: unsorted ") + what);
        }
    };
    check_sorted(posture, "posture schedule");
    check_sorted(hr_bpm, "hr schedule");
    check_sorted(resp_bpm, "respiration schedule");
    check_sorted(stages, "stage schedule");
    for (const auto& p : posture)
        if (p.posture == Posture::Indeterminate)
            throw std::invalid_argument("scenario: posture schedule cannot contain indeterminate");
    for (const auto& p : hr_bpm)
        if (p.value < 45.0 || p.value > 120.0)
            throw std::invalid_argument("scenario: hr must lie in [45, 120] bpm");
    for (const auto& p : resp_bpm)
        if (p.value < 6.0 || p.value > 42.0)
            throw std::invalid_argument("scenario: respiration must lie in [6, 42] breaths/min");
    for (const auto& ev : events)
        if (ev.t_s < 0.0 || ev.t_s >= duration_s)
            throw std::invalid_argument("scenario: event outside the recording");
}

double piecewise_linear(const std::vector<RampPoint>& pts, double t) {
    if (pts.empty()) throw std::invalid_argument("empty schedule");
    if (t <= pts.front().t_s) return pts.front().value;
    if (t >= pts.back().t_s) return pts.back().value;
    std::size_t i = 0;
    while (i + 1 < pts.size() && pts[i + 1].t_s < t) ++i;
    const double span = pts[i + 1].t_s - pts[i].t_s;
    if (span <= 0.0) return pts[i + 1].value;
    const double u = (t - pts[i].t_s) / span;
    return pts[i].value + u * (pts[i + 1].value - pts[i].value);
}

Posture posture_at(const std::vector<PosturePoint>& schedule, double t) {
    Posture p = schedule.front().posture;
    for (const auto& pt : schedule) {
        if (pt.start_s > t) break;
        p = pt.posture;
    }
    return p;
}

std::vector<double> beat_times(const ScenarioSpec& spec) {
    const std::size_t n = fast_len(spec);
    const double dt = 1.0 / kFastRate;
    std::vector<double> beats;
    double phase = 0.0;
    double next_beat = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double f = piecewise_linear(spec.hr_bpm, t) / 60.0;
        const double new_phase = phase + f * dt;
        while (new_phase >= next_beat) {
            const double frac = (next_beat - phase) / (new_phase - phase);
            beats.push_back(t - dt + frac * dt);
            next_beat += 1.0;
        }
        phase = new_phase;
    }
    return beats;
}

std::vector<double> Components::mixed(double offset) const {
    std::vector<double> out(signal.size(), offset);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += signal[i];
        if (!noise.empty()) out[i] += noise[i];
        if (!extra.empty()) out[i] += extra[i];
    }
    return out;
}

double Components::snr_db() const {
    return 10.0 * std::log10(power_of(signal) / power_of(noise));
}

BcgResult gen_bcg(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = fast_len(spec);
    const double dt = 1.0 / kFastRate;

    BcgResult result;
    result.beat_times = beat_times(spec);

    // pulse template summed at the beat times
    std::vector<double> pulse(n, 0.0);
    const double support = 4.0 * kPulseSigmaS;
    for (double tb : result.beat_times) {
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((tb - support) / dt)));
        const auto hi = std::min(n, static_cast<std::size_t>(std::floor((tb + support) / dt)) + 1);
        for (std::size_t i = lo; i < hi; ++i) {
            const double u = (static_cast<double>(i) * dt - tb) / kPulseSigmaS;
            pulse[i] += -kPulseAmpV * u * std::exp(0.5 - 0.5 * u * u);
        }
    }

    // respiration ripple rides on every patch (outside the SNR budget)
    std::vector<double> ripple(n);
    {
        double phase = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            phase += piecewise_linear(spec.resp_bpm, static_cast<double>(i) * dt) / 60.0 * dt;
            ripple[i] = 0.015 * std::sin(2.0 * std::numbers::pi * phase);
        }
    }

    double max_signal_power = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto& ch = result.ch[c];
        ch.signal.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Posture p = posture_at(spec.posture, static_cast<double>(i) * dt);
            ch.signal[i] = pulse_gain(spec, p, c) * pulse[i];
        }
        max_signal_power = std::max(max_signal_power, power_of(ch.signal));
    }

    // involuntary-motion interference: the same waveform on every patch, so a
    // cross-channel decomposition can reject it while a single patch cannot
    std::vector<double> motion(n, 0.0);
    if (spec.motion_disturbance > 0.0) {
        Rng m_rng(derive_seed(spec.seed, "bcg_motion"));
        motion = pink_noise(n, m_rng);
        scale_to_power(motion, spec.motion_disturbance * spec.motion_disturbance * max_signal_power);
    }

    for (int c = 0; c < 3; ++c) {
        auto& ch = result.ch[c];
        ch.extra.resize(n);
        for (std::size_t i = 0; i < n; ++i) ch.extra[i] = ripple[i] + motion[i];
        Rng rng(derive_seed(spec.seed, "bcg_noise", static_cast<std::uint64_t>(c)));
        add_noise_at_snr(ch, pink_noise(n, rng), spec.snr_bcg_db, max_signal_power);
    }
    return result;
}

EegResult gen_eeg(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = fast_len(spec);
    const double dt = 1.0 / kFastRate;

    const auto drawn = draw_events(spec);
    check_no_overlap(drawn, EventKind::Spindle, EventKind::KComplex);

    EegResult result;
    for (const auto& ev : drawn) {
        if (ev.kind == EventKind::Movement) continue;
        result.events.push_back({ev.kind, ev.start_s, ev.end_s});
    }

    // shared background: band-limited pink noise at the nominal EEG rms
    Rng bg_rng(derive_seed(spec.seed, "eeg_background"));
    auto shared = pink_noise(n, bg_rng);
    if (n > 40) shared = filtfilt(design_butterworth_bandpass(5, 0.5, 35.0, kFastRate), shared);
    scale_to_power(shared, kEegBackgroundRmsV * kEegBackgroundRmsV);
    const double bg_rms = std::sqrt(power_of(shared));

    for (const auto& ev : drawn) {
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(ev.start_s / dt)));
        const auto hi = std::min(n, static_cast<std::size_t>(std::floor(ev.end_s / dt)) + 1);
        if (lo >= hi) continue;
        const double dur = ev.end_s - ev.start_s;
        if (ev.kind == EventKind::Spindle) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double t = static_cast<double>(i) * dt - ev.start_s;
                const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t / dur));
                shared[i] += ev.amplitude * bg_rms * hann *
                             std::sin(2.0 * std::numbers::pi * ev.freq_hz * t);
            }
        } else if (ev.kind == EventKind::KComplex) {
            // sharp negative lobe then a longer positive rebound
            const double neg = 0.3 * dur, pos = 0.7 * dur;
            for (std::size_t i = lo; i < hi; ++i) {
                const double t = static_cast<double>(i) * dt - ev.start_s;
                double v;
                if (t < neg)
                    v = -std::sin(std::numbers::pi * t / neg);
                else
                    v = 0.7 * std::sin(std::numbers::pi * (t - neg) / pos);
                shared[i] += ev.amplitude * bg_rms * v;
            }
        }
    }

    for (int c = 0; c < 2; ++c) {
        auto& ch = result.ch[c];
        ch.signal = shared;
        Rng rng(derive_seed(spec.seed, "eeg_noise", static_cast<std::uint64_t>(c)));
        auto indep = pink_noise(n, rng);
        if (n > 40) indep = filtfilt(design_butterworth_bandpass(5, 0.5, 35.0, kFastRate), indep);
        add_noise_at_snr(ch, std::move(indep), spec.snr_eeg_db, power_of(shared));
    }
    return result;
}

SlowResult gen_slow(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n_slow = (fast_len(spec) + 2) / 3;
    const double dt = 1.0 / slow_rate();

    const auto drawn = draw_events(spec);
    check_no_overlap(drawn, EventKind::Movement, EventKind::Movement);

    SlowResult result;
    for (int c = 0; c < 3; ++c) {
        auto& ch = result.ch[c];
        ch.signal.resize(n_slow);
        ch.extra.resize(n_slow);

        double phase = 0.0;
        for (std::size_t i = 0; i < n_slow; ++i) {
            const double t = static_cast<double>(i) * dt;
            const Posture p = posture_at(spec.posture, t);
            const bool pressed = pressed_patch(p) == c;
            phase += piecewise_linear(spec.resp_bpm, t) / 60.0 * dt;
            const double amp = pressed ? kRespAmpPressedV : kRespAmpUnpressedV;
            ch.signal[i] = amp * std::sin(2.0 * std::numbers::pi * phase);
            ch.extra[i] = kSeatedBaselineV[c] +
                          (pressed ? -kPressedBaselineDropV : kUnpressedBaselineRiseV);
        }

        Rng rng(derive_seed(spec.seed, "resp_noise", static_cast<std::uint64_t>(c)));
        add_noise_at_snr(ch, pink_noise(n_slow, rng), spec.snr_resp_db, 0.0);
    }

    // movement bursts: white noise scaled against the channel's quiet variance
    for (int c = 0; c < 3; ++c) {
        auto& ch = result.ch[c];
        const double quiet_var = power_of(ch.signal) + power_of(ch.noise);
        Rng rng(derive_seed(spec.seed, "movement", static_cast<std::uint64_t>(c)));
        for (const auto& ev : drawn) {
            if (ev.kind != EventKind::Movement) continue;
            const Posture p = posture_at(spec.posture, ev.start_s);
            const double gain = pressed_patch(p) == c ? 1.0 : 0.6;
            const double stddev = std::sqrt(ev.amplitude * quiet_var) * gain;
            const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(ev.start_s / dt)));
            const auto hi = std::min(n_slow, static_cast<std::size_t>(std::floor(ev.end_s / dt)) + 1);
            for (std::size_t i = lo; i < hi; ++i) ch.extra[i] += stddev * rng.gaussian();
        }
    }
    return result;
}

BaselineCalibration seated_calibration(const ScenarioSpec& spec) {
    const double dur = 60.0;
    const auto n = static_cast<std::size_t>(std::llround(dur * slow_rate()));
    const double dt = 1.0 / slow_rate();
    const double resp_hz = piecewise_linear(spec.resp_bpm, 0.0) / 60.0;

    BaselineCalibration calib;
    for (int c = 0; c < 3; ++c) {
        Components ch;
        ch.signal.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            ch.signal[i] = kRespAmpSeatedV *
                           std::sin(2.0 * std::numbers::pi * resp_hz * static_cast<double>(i) * dt);
        Rng rng(derive_seed(spec.seed, "seated_noise", static_cast<std::uint64_t>(c)));
        add_noise_at_snr(ch, pink_noise(n, rng), spec.snr_resp_db, 0.0);

        const auto x = ch.mixed(kSeatedBaselineV[c]);
        double mu = 0.0;
        for (double v : x) mu += v;
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (double v : x) var += (v - mu) * (v - mu);
        calib.seated_mean_v[c] = mu;
        calib.stationary_variance[c] = var / static_cast<double>(n);
    }
    return calib;
}

Recording gen_recording(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = fast_len(spec);
    const double dt = 1.0 / kFastRate;

    Recording rec;
    rec.fast_rate_hz = kFastRate;
    rec.slow_rate = {125, 3};
    rec.start_time = "2024-01-01T00:00:00Z";

    const auto bcg = gen_bcg(spec);
    const auto eeg = gen_eeg(spec);
    const auto slw = gen_slow(spec);

    rec.fast_channel(FastChannel::EegL) = eeg.ch[0].mixed(kMidRailV);
    rec.fast_channel(FastChannel::EegR) = eeg.ch[1].mixed(kMidRailV);
    rec.fast_channel(FastChannel::BcgP1) = bcg.ch[0].mixed(kMidRailV);
    rec.fast_channel(FastChannel::BcgP2) = bcg.ch[1].mixed(kMidRailV);
    rec.fast_channel(FastChannel::BcgP3) = bcg.ch[2].mixed(kMidRailV);

    // EOG placeholder: slow rolling sinusoid plus a little pink noise
    for (int c = 0; c < 2; ++c) {
        Rng rng(derive_seed(spec.seed, "eog", static_cast<std::uint64_t>(c)));
        auto noise = pink_noise(n, rng);
        scale_to_power(noise, 0.01 * 0.01);
        std::vector<double> ch(n);
        for (std::size_t i = 0; i < n; ++i)
            ch[i] = kMidRailV +
                    0.05 * std::sin(2.0 * std::numbers::pi * 0.25 * static_cast<double>(i) * dt +
                                    (c ? std::numbers::pi / 3.0 : 0.0)) +
                    noise[i];
        rec.fast_channel(c == 0 ? FastChannel::EogL : FastChannel::EogR) = std::move(ch);
    }

    for (int c = 0; c < 3; ++c)
        rec.slow[c] = slw.ch[c].mixed(0.0);

    // keep every sample inside the 12-bit ADC range
    for (auto& ch : rec.fast)
        for (double& v : ch) v = std::clamp(v, 0.0, 4095.0 * rec.adc_scale);
    for (auto& ch : rec.slow)
        for (double& v : ch) v = std::clamp(v, 0.0, 4095.0 * rec.adc_scale);

    rec.validate();
    return rec;
}

ScenarioSpec scenario_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScenarioSpec spec;
    spec.duration_s = j.value("duration_s", 300.0);
    spec.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("gain_profile"))
        spec.gain_profile = gain_profile_from_name(j["gain_profile"].get<std::string>());

    auto parse_ramp = [&j](const char* key, std::vector<RampPoint>& out, const char* value_key) {
        if (!j.contains(key)) return;
        const auto& v = j[key];
        out.clear();
        if (v.is_number()) {
            out.push_back({0.0, v.get<double>()});
            return;
        }
        for (const auto& p : v) out.push_back({p.at("t_s").get<double>(), p.at(value_key).get<double>()});
    };
    parse_ramp("hr_bpm", spec.hr_bpm, "bpm");
    parse_ramp("resp_bpm", spec.resp_bpm, "bpm");

    if (j.contains("posture")) {
        spec.posture.clear();
        for (const auto& p : j["posture"]) {
            const auto name = p.at("posture").get<std::string>();
            Posture posture;
            if (name == "back") posture = Posture::Back;
            else if (name == "left") posture = Posture::Left;
            else if (name == "right") posture = Posture::Right;
            else throw std::invalid_argument("scenario: unknown posture '" + name + "'");
            spec.posture.push_back({p.at("start_s").get<double>(), posture});
        }
    }
    if (j.contains("stages")) {
        spec.stages.clear();
        for (const auto& p : j["stages"])
            spec.stages.push_back({p.at("start_s").get<double>(),
                                   stage_from_name(p.at("stage").get<std::string>())});
    }
    if (j.contains("events")) {
        for (const auto& e : j["events"]) {
            EventSpec ev;
            ev.kind = event_kind_from_name(e.at("kind").get<std::string>());
            ev.t_s = e.at("t_s").get<double>();
            ev.dur_s = e.value("dur_s", 0.0);
            ev.scale = e.value("scale", 30.0);
            spec.events.push_back(ev);
        }
    }
    if (j.contains("snr_db")) {
        const auto& s = j["snr_db"];
        if (s.is_number()) {
            spec.snr_bcg_db = spec.snr_eeg_db = spec.snr_resp_db = s.get<double>();
        } else {
            spec.snr_bcg_db = s.value("bcg", spec.snr_bcg_db);
            spec.snr_eeg_db = s.value("eeg", spec.snr_eeg_db);
            spec.snr_resp_db = s.value("resp", spec.snr_resp_db);
        }
    }
    spec.motion_disturbance = j.value("motion_disturbance", spec.motion_disturbance);
    spec.validate();
    return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json_text(text);
}

void write_bundle(const ScenarioSpec& spec, const std::string& dir) {
    namespace fs = std::filesystem;
    const Recording rec = gen_recording(spec);
    save_recording(rec, dir);

    const auto drawn_eeg = gen_eeg(spec).events;
    std::vector<EventInterval> events = drawn_eeg;
    for (const auto& ev : draw_events(spec))  // movement intervals carry their drawn durations
        if (ev.kind == EventKind::Movement)
            events.push_back({EventKind::Movement, ev.start_s, ev.end_s});
    std::sort(events.begin(), events.end(),
              [](const EventInterval& a, const EventInterval& b) { return a.start_s < b.start_s; });
    save_events(events, (fs::path(dir) / "events.csv").string());

    Hypnogram hyp;
    const auto n_epochs = static_cast<std::size_t>(std::floor(spec.duration_s / 30.0));
    for (std::size_t e = 0; e < n_epochs; ++e) {
        const double t = static_cast<double>(e) * 30.0;
        Stage stage = spec.stages.front().stage;
        for (const auto& s : spec.stages) {
            if (s.start_s > t) break;
            stage = s.stage;
        }
        hyp.stages.push_back(stage);
    }
    save_stages(hyp, (fs::path(dir) / "stages.csv").string());

    nlohmann::json truth;
    truth["seed"] = spec.seed;
    truth["gain_profile"] = to_string(spec.gain_profile);
    auto& hr = truth["hr_bpm"] = nlohmann::json::array();
    auto& resp = truth["resp_bpm"] = nlohmann::json::array();
    for (double t = 0.0; t < spec.duration_s; t += 1.0) {
        hr.push_back({{"t_s", t}, {"bpm", piecewise_linear(spec.hr_bpm, t)}});
        resp.push_back({{"t_s", t}, {"bpm", piecewise_linear(spec.resp_bpm, t)}});
    }
    auto& postures = truth["postures"] = nlohmann::json::array();
    for (const auto& p : spec.posture)
        postures.push_back({{"start_s", p.start_s}, {"posture", to_string(p.posture)}});
    auto& evs = truth["events"] = nlohmann::json::array();
    for (const auto& ev : events)
        evs.push_back({{"kind", to_string(ev.kind)}, {"start_s", ev.start_s}, {"end_s", ev.end_s}});

    std::ofstream truth_out(fs::path(dir) / "truth.json");
    if (!truth_out) throw std::runtime_error("cannot write truth.json in " + dir);
    truth_out << truth.dump(2) << '\n';

    const auto calib = seated_calibration(spec);
    nlohmann::json cj;
    cj["seated_mean_v"] = calib.seated_mean_v;
    cj["stationary_variance"] = calib.stationary_variance;
    std::ofstream calib_out(fs::path(dir) / "calib.json");
    if (!calib_out) throw std::runtime_error("cannot write calib.json in " + dir);
    calib_out << cj.dump(2) << '\n';
}

} // namespace somno::synth
