#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "somno/recording.hpp"

namespace somno {

/// STFT band definitions and segment sizes per event kind. Spindle bands sit
/// in the sigma range; K-complex bands cover the slow-wave/delta range and
/// need the longer segment for 0.5 Hz resolution.
struct MicroeventParams {
    double band_a_lo, band_a_hi;
    double band_b_lo, band_b_hi;
    std::size_t stft_seg_len, stft_hop;
};

MicroeventParams microevent_params(EventKind kind);

/// Raw EEG plus five derived rows, all resampled to the raw length:
/// band-A power, band-B power, level-2 approximation, level-2 detail, first IMF.
struct AugmentedChannels {
    std::array<std::vector<double>, 6> channels;
    double fs_hz = 0.0;
    EventKind kind = EventKind::Spindle;
};

struct FeatureMatrix {
    std::vector<std::vector<double>> rows;  // [windows][60]
    std::vector<int> labels;                // empty, or one {0,1} per row
    double window_len_s = 1.0;
    double hop_s = 0.25;
    EventKind kind = EventKind::Spindle;
    std::uint64_t schema_hash = 0;

    bool has_labels() const { return !labels.empty(); }
};

std::uint64_t feature_schema_hash(EventKind kind, double window_len_s);

inline constexpr std::size_t kStatsPerChannel = 10;
inline constexpr std::size_t kFeatureColumns = 6 * kStatsPerChannel;

/// The ten window statistics in column order:
/// max, mean, median, std (population), sum, energy, mean-crossing, IQR, p10, p90.
std::array<double, kStatsPerChannel> window_stats10(const std::vector<double>& w);

struct TreeNode {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    std::array<std::uint32_t, 2> votes{0, 0};
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
    std::vector<Tree> trees;
    std::size_t n_trees = 0;
    std::uint64_t seed = 0;
    std::uint64_t schema_hash = 0;
    EventKind kind = EventKind::Spindle;
};

struct Prediction {
    int label = 0;
    double positive_fraction = 0.0;
};

struct DetectedEvent {
    EventInterval interval;
    bool overlong = false;  // merged run exceeded 3 s and was reported as-is
};

struct DetectorScores {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double accuracy = 0.0;
};

/// Feature-channel augmentation over 30-s epochs of a 0.5-35 Hz filtered EEG
/// stream. Outputs six rows of the input length; a final partial epoch shorter
/// than the STFT segment gets zero-valued derived rows.
AugmentedChannels build_feature_channels(const std::vector<double>& eeg, double fs_hz, EventKind kind);
AugmentedChannels build_feature_channels_serial(const std::vector<double>& eeg, double fs_hz, EventKind kind);

/// Overlapping 1-s windows (hop 0.25 s) -> 60 statistics per window.
FeatureMatrix window_statistics(const AugmentedChannels& ac, double hop_s = 0.25);
FeatureMatrix window_statistics_serial(const AugmentedChannels& ac, double hop_s = 0.25);

/// Minority class oversampled to parity: synthetic = p + u*(q - p) with q one
/// of p's k nearest minority neighbours. If the minority has fewer than k+1
/// rows, k is reduced and a note is written to *warning.
FeatureMatrix smote_balance(const FeatureMatrix& x, std::size_t k, std::uint64_t seed,
                            std::string* warning = nullptr);

/// Bootstrap + Gini random forest, ceil(sqrt(60)) = 8 candidate features per
/// split, grown to purity (min-leaf 1). Deterministic per (data, seed).
ForestModel train_forest(const FeatureMatrix& x, std::size_t n_trees, std::uint64_t seed);
ForestModel train_forest_serial(const FeatureMatrix& x, std::size_t n_trees, std::uint64_t seed);

std::vector<Prediction> predict(const ForestModel& model, const FeatureMatrix& x);
std::vector<Prediction> predict_serial(const ForestModel& model, const FeatureMatrix& x);

void save_model(const ForestModel& model, const std::string& path);
ForestModel load_model(const std::string& path);

/// Window-level truth from annotated events: a window is positive when at
/// least half of it overlaps an event of the given kind (ties positive).
std::vector<int> window_truth_labels(const std::vector<EventInterval>& events, EventKind kind,
                                     std::size_t n_windows, double fs_hz, std::size_t win_len,
                                     std::size_t hop);

/// Merge positive windows separated by at most merge_gap_s into intervals of
/// [first window start, last window end].
std::vector<DetectedEvent> merge_positive_windows(const std::vector<int>& labels, double fs_hz,
                                                  std::size_t win_len, std::size_t hop,
                                                  double merge_gap_s = 0.25);

/// Full pipeline on one EEG channel: 0.5-35 Hz filter, augmentation, window
/// statistics, forest prediction, interval extraction. Events shorter than
/// 0.5 s are dropped; longer than 3 s are kept and flagged.
std::vector<DetectedEvent> detect_events(const std::vector<double>& eeg, double fs_hz,
                                         const ForestModel& model, EventKind kind);

/// Window labels for one channel (the precursor of detect_events, exposed for
/// evaluation and channel fusion).
std::vector<int> detect_event_windows(const std::vector<double>& eeg, double fs_hz,
                                      const ForestModel& model, EventKind kind);

DetectorScores evaluate_detector(const std::vector<int>& predicted, const std::vector<int>& truth);

} // namespace somno
