#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "somno/physio.hpp"
#include "somno/recording.hpp"

namespace somno::synth {

struct PosturePoint {
    double start_s = 0.0;
    Posture posture = Posture::Back;
};

struct StagePoint {
    double start_s = 0.0;
    Stage stage = Stage::Light;
};

struct RampPoint {
    double t_s = 0.0;
    double value = 0.0;
};

struct EventSpec {
    EventKind kind = EventKind::Spindle;
    double t_s = 0.0;      // event start
    double dur_s = 0.0;    // 0 = draw from the kind's default range
    double scale = 30.0;   // movement only: burst variance multiple of stationary
};

/// Which patches carry the pulse strongly: Pressed = the patch under the head;
/// Temple = both side patches regardless of posture (strong temporal-artery pulse).
enum class GainProfile { Pressed, Temple };

GainProfile gain_profile_from_name(const std::string& name);
const char* to_string(GainProfile g);

struct ScenarioSpec {
    double duration_s = 300.0;
    std::uint64_t seed = 1;
    GainProfile gain_profile = GainProfile::Pressed;
    std::vector<PosturePoint> posture{{0.0, Posture::Back}};
    std::vector<RampPoint> hr_bpm{{0.0, 72.0}};
    std::vector<RampPoint> resp_bpm{{0.0, 15.0}};
    std::vector<EventSpec> events;
    std::vector<StagePoint> stages{{0.0, Stage::Light}};
    double snr_bcg_db = 0.0;
    double snr_eeg_db = 5.0;
    double snr_resp_db = 5.0;
    /// Involuntary-motion interference on the pressure patches: identical on
    /// every patch, pink, with RMS = this factor times the strongest pulse
    /// coupling's RMS. Outside the per-channel SNR budget.
    double motion_disturbance = 1.0;

    /// Sorted schedules, hr in [45,120] bpm, resp in [6,42] breaths/min.
    void validate() const;
};

ScenarioSpec load_scenario(const std::string& path);
ScenarioSpec scenario_from_json_text(const std::string& text);

/// One generated channel split into the parts the SNR bookkeeping needs.
struct Components {
    std::vector<double> signal;  // what the declared SNR counts as signal
    std::vector<double> noise;   // scaled so P(signal)/P(noise) hits the declared SNR
    std::vector<double> extra;   // baselines / ripple, outside the SNR budget

    std::vector<double> mixed(double offset = 0.0) const;
    double snr_db() const;
};

struct BcgResult {
    std::array<Components, 3> ch;
    std::vector<double> beat_times;
};

struct EegResult {
    std::array<Components, 2> ch;
    std::vector<EventInterval> events;
};

struct SlowResult {
    std::array<Components, 3> ch;
};

/// Gaussian-derivative pulse train at the scheduled instantaneous heart rate,
/// posture/profile-dependent per-patch gains, a shared motion-noise component,
/// and per-channel pink noise at the declared SNR.
BcgResult gen_bcg(const ScenarioSpec& spec);

/// Two EEG channels: shared band-limited pink background carrying the injected
/// events (Hann spindle bursts, biphasic K-complexes), plus independent noise.
EegResult gen_eeg(const ScenarioSpec& spec);

/// Pressure baselines per posture (pressed patch 0.35 V below its seated
/// level), respiration sinusoid, pink noise, and movement bursts.
SlowResult gen_slow(const ScenarioSpec& spec);

/// Exact beat schedule implied by the hr ramp (phase-integrated).
std::vector<double> beat_times(const ScenarioSpec& spec);

/// Full in-memory Recording (all channels offset to the ADC mid-rail).
Recording gen_recording(const ScenarioSpec& spec);

/// Recording bundle + events.csv + stages.csv + truth.json + calib.json.
void write_bundle(const ScenarioSpec& spec, const std::string& dir);

/// The calibration a seated wear of this scenario's mask would produce
/// (used by write_bundle for calib.json).
BaselineCalibration seated_calibration(const ScenarioSpec& spec);

double piecewise_linear(const std::vector<RampPoint>& pts, double t);
Posture posture_at(const std::vector<PosturePoint>& schedule, double t);

} // namespace somno::synth
