#pragma once

#include <array>
#include <vector>

#include "somno/recording.hpp"

namespace somno {

/// Eigendecomposition of the 3-channel covariance plus the projected series.
struct Pca3Decomposition {
    std::array<std::array<double, 3>, 3> sigma{};   // covariance (V^2)
    std::array<std::array<double, 3>, 3> phi{};     // eigenvectors in columns, unit norm
    std::array<double, 3> lambda{};                 // descending eigenvalues (V^2)
    std::array<std::vector<double>, 3> components;  // projections of the centered data
};

struct BaselineCalibration {
    std::array<double, 3> seated_mean_v{};
    std::array<double, 3> stationary_variance{};
};

struct RatePoint {
    double time_s = 0.0;
    double value = 0.0;   // bpm or breaths/min; NaN when the window is unusable
    double quality = 0.0; // periodicity score of the selected signal
};
using RateSeries = std::vector<RatePoint>;

enum class HrMode { Full, NoPcaBestPatch, NoPcaPressedPatch };

HrMode hr_mode_from_name(const std::string& name);
const char* to_string(HrMode m);

struct HrOptions {
    HrMode mode = HrMode::Full;
    int pressed_patch = 0;  // used by NoPcaPressedPatch only
};

enum class Posture { Back, Left, Right, Indeterminate };

const char* to_string(Posture p);

struct PostureBlock {
    double time_s = 0.0;   // block start
    Posture posture = Posture::Indeterminate;
    double max_delta_v = 0.0;
};

enum class MovementSeverity { Minor, Major };

const char* to_string(MovementSeverity s);

struct MovementEvent {
    EventInterval interval;
    MovementSeverity severity = MovementSeverity::Minor;
};

/// Sample covariance eigendecomposition (cyclic Jacobi to 1e-12) of a 3xM
/// window, channels mean-removed. Requires M >= 3; zero-variance channels are
/// fine and produce zero eigenvalues.
Pca3Decomposition pca3(const std::array<std::vector<double>, 3>& window);

/// Per 30-s window (hop 10 s): band-pass 0.75-3 Hz, PCA across the three
/// patches, keep the most periodic component, and read the rate off its
/// spectral peak. Windows that are entirely NaN yield NaN points.
RateSeries estimate_heart_rate(const std::array<std::vector<double>, 3>& bcg, double fs_hz,
                               const HrOptions& opts = {});
RateSeries estimate_heart_rate_serial(const std::array<std::vector<double>, 3>& bcg, double fs_hz,
                                      const HrOptions& opts = {});

/// Per 60-s window (step 30 s): pick the patch with the most 0.1-0.7 Hz power,
/// band-pass +-40% around its spectral peak, and count breathing peaks.
RateSeries estimate_respiration(const std::array<std::vector<double>, 3>& slow, double fs_hz);

/// Per-patch mean and variance over calm seated wear (>= 30 s of slow data).
BaselineCalibration calibrate_seated_baseline(const Recording& rec);

/// Per 10-s block: delta = seated baseline - block mean per patch; the patch
/// with the largest delta wins (P1=Back, P2=Left, P3=Right) when it clears
/// 0.05 V, ties broken in patch order.
std::vector<PostureBlock> classify_posture(const Recording& rec, const BaselineCalibration& calib);

/// 2-s blocks, 1-s hop: movement when some patch variance reaches 5x its
/// stationary variance, Major at 25x; overlapping positive blocks merge.
std::vector<MovementEvent> detect_movement(const Recording& rec, const BaselineCalibration& calib);

} // namespace somno
