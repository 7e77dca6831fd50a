#pragma once

#include <array>
#include <string>
#include <vector>

#include "somno/recording.hpp"

namespace somno {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> counts;  // [truth][predicted]
    std::size_t total() const;
};

struct ClassScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // class absent from both truth and prediction
};

enum class CoherenceLabel { None, Low, Medium, High, VeryHigh };

const char* to_string(CoherenceLabel l);

/// Coherence label thresholds: [0.2,0.3) Low, [0.3,0.4) Medium, [0.4,0.5) High,
/// [0.5,1] VeryHigh, below 0.2 None.
CoherenceLabel coherence_label(double value);

struct CoherenceBand {
    std::string name;
    double lo_hz = 0.0, hi_hz = 0.0;
    double mean = 0.0;
    CoherenceLabel label = CoherenceLabel::None;
};

struct CoherenceReport {
    std::vector<double> freqs_hz;
    std::vector<double> coherence;  // in [0,1]
    std::array<CoherenceBand, 4> bands;  // Delta 0.5-4, Theta 4-7, Alpha 8-12, Beta 12-25
};

/// Zero-normalized cross-correlation (population standard deviations).
/// Throws on length mismatch, n < 2, or a constant input.
double zncc(const std::vector<double>& f, const std::vector<double>& t);

/// Welch magnitude-squared coherence: 4 s Hann segments, 50% overlap.
/// Requires at least 3 segments.
CoherenceReport msc_coherence(const std::vector<double>& x, const std::vector<double>& y, double fs_hz);

/// Cohen's kappa between two equal-length hypnograms.
double cohens_kappa(const Hypnogram& a, const Hypnogram& b);
double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_classes);

/// Confusion matrix plus one-vs-rest accuracy/precision/recall/F1 per class
/// (0 by convention on zero denominators).
std::pair<ConfusionMatrix, std::vector<ClassScores>> confusion_and_scores(
    const std::vector<int>& truth, const std::vector<int>& predicted,
    const std::vector<std::string>& classes);

} // namespace somno
