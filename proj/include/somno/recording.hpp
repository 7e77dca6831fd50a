#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace somno {

/// Exact rational sampling rate (the slow rate 125/3 Hz must not be rounded).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double hz() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class FastChannel : int { EegL = 0, EegR, EogL, EogR, BcgP1, BcgP2, BcgP3 };
enum class SlowChannel : int { RespP1 = 0, RespP2, RespP3 };

inline constexpr int kNumFastChannels = 7;
inline constexpr int kNumSlowChannels = 3;

const char* to_string(FastChannel c);
const char* to_string(SlowChannel c);

/// Parse a channel name as written in the CSV headers ("eeg_l", "resp_p2", ...).
/// Throws std::invalid_argument for unknown names.
FastChannel fast_channel_from_name(const std::string& name);
SlowChannel slow_channel_from_name(const std::string& name);

/// Multi-rate recording: 7 channels at the fast rate (biopotentials + pressure
/// ballistics) and 3 respiration channels at one third of it. Lost samples are NaN.
struct Recording {
    std::array<std::vector<double>, kNumFastChannels> fast;
    std::array<std::vector<double>, kNumSlowChannels> slow;
    double fast_rate_hz = 125.0;
    Rational slow_rate{125, 3};
    std::string start_time = "1970-01-01T00:00:00Z";
    double adc_scale = 3.3 / 4096.0;

    std::size_t fast_len() const { return fast[0].size(); }
    std::size_t slow_len() const { return slow[0].size(); }

    std::vector<double>& fast_channel(FastChannel c) { return fast[static_cast<int>(c)]; }
    const std::vector<double>& fast_channel(FastChannel c) const { return fast[static_cast<int>(c)]; }
    std::vector<double>& slow_channel(SlowChannel c) { return slow[static_cast<int>(c)]; }
    const std::vector<double>& slow_channel(SlowChannel c) const { return slow[static_cast<int>(c)]; }

    /// Throws std::runtime_error if any structural invariant is violated
    /// (unequal channel lengths, slow length != ceil(fast/3), bad rates).
    void validate() const;
};

enum class EventKind { Spindle, KComplex, Movement };

const char* to_string(EventKind k);
EventKind event_kind_from_name(const std::string& name);

/// Annotated interval, seconds from recording start.
struct EventInterval {
    EventKind kind = EventKind::Spindle;
    double start_s = 0.0;
    double end_s = 0.0;

    double duration() const { return end_s - start_s; }
    double midpoint() const { return 0.5 * (start_s + end_s); }

    /// end > start; spindle / K-complex durations confined to [0.5, 3.0] s.
    void validate() const;
};

enum class Stage : int { Wake = 0, Light, Deep, Rem };

const char* to_string(Stage s);        // "W", "L", "D", "R"
Stage stage_from_name(const std::string& name);

struct Hypnogram {
    double epoch_len_s = 30.0;
    std::vector<Stage> stages;
};

// ---- operations ------------------------------------------------------------

/// volts = raw * 3.3 / 4096. Throws std::out_of_range unless 0 <= raw <= 4095.
double adc_to_volts(unsigned raw);

/// Reads fast.csv, slow.csv, meta.json from `dir`. Throws std::runtime_error
/// on malformed headers, ragged rows, unknown channel names, or missing meta.
Recording load_recording(const std::string& dir);

/// Writes fast.csv, slow.csv, meta.json into `dir` (created if needed).
/// Values round-trip through load_recording within 1e-9 V.
void save_recording(const Recording& rec, const std::string& dir);

/// Non-overlapping consecutive windows over one fast or slow channel; a final
/// partial window is discarded.
std::vector<std::vector<double>> slice_epochs(const Recording& rec, FastChannel c, double epoch_len_s);
std::vector<std::vector<double>> slice_epochs(const Recording& rec, SlowChannel c, double epoch_len_s);

std::vector<EventInterval> load_events(const std::string& path);
void save_events(const std::vector<EventInterval>& events, const std::string& path);

Hypnogram load_stages(const std::string& path);
void save_stages(const Hypnogram& h, const std::string& path);

} // namespace somno
