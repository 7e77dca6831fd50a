#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "somno/dsp.hpp"
#include "somno/microevent.hpp"
#include "somno/rng.hpp"
#include "somno/synth.hpp"

using namespace somno;

namespace {

std::vector<double> pink_background(std::size_t n, std::uint64_t seed) {
    synth::ScenarioSpec spec;
    spec.duration_s = static_cast<double>(n) / 125.0;
    spec.seed = seed;
    return synth::gen_eeg(spec).ch[0].mixed();
}

FeatureMatrix blobs(std::size_t per_class, std::uint64_t seed) {
    FeatureMatrix fm;
    fm.kind = EventKind::Spindle;
    fm.schema_hash = feature_schema_hash(fm.kind, fm.window_len_s);
    Rng rng(seed);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = i < per_class ? 0 : 1;
        std::vector<double> row(kFeatureColumns);
        for (double& v : row) v = rng.gaussian() + (label ? 8.0 : -8.0);
        fm.rows.push_back(std::move(row));
        fm.labels.push_back(label);
    }
    return fm;
}

double dist_point_to_segment(const std::vector<double>& r, const std::vector<double>& p,
                             const std::vector<double>& q) {
    double qp2 = 0.0, dot = 0.0;
    for (std::size_t c = 0; c < r.size(); ++c) {
        qp2 += (q[c] - p[c]) * (q[c] - p[c]);
        dot += (r[c] - p[c]) * (q[c] - p[c]);
    }
    const double u = qp2 > 0.0 ? std::clamp(dot / qp2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t c = 0; c < r.size(); ++c) {
        const double proj = p[c] + u * (q[c] - p[c]);
        d2 += (r[c] - proj) * (r[c] - proj);
    }
    return std::sqrt(d2);
}

} // namespace

TEST_CASE("window_stats10 on the hand-checked vector [1,2,3,4]") {
    const auto s = window_stats10({1.0, 2.0, 3.0, 4.0});
    CHECK(s[0] == 4.0);                                     // max
    CHECK(s[1] == doctest::Approx(2.5).epsilon(1e-15));     // mean
    CHECK(s[2] == doctest::Approx(2.5).epsilon(1e-15));     // median
    CHECK(s[3] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));  // population std
    CHECK(s[4] == doctest::Approx(10.0).epsilon(1e-15));    // sum
    CHECK(s[5] == doctest::Approx(30.0).epsilon(1e-15));    // energy
    CHECK(s[6] == 1.0);                                     // mean-crossings
    CHECK(s[7] == doctest::Approx(1.5).epsilon(1e-15));     // IQR (linear interpolation)
    CHECK(s[8] == doctest::Approx(1.3).epsilon(1e-15));     // p10
    CHECK(s[9] == doctest::Approx(3.7).epsilon(1e-15));     // p90
}

TEST_CASE("window_stats10 on a constant window") {
    const auto s = window_stats10(std::vector<double>(125, 0.42));
    CHECK(s[0] == 0.42);
    CHECK(s[1] == doctest::Approx(0.42));
    CHECK(s[2] == 0.42);
    CHECK(s[3] <= 1e-12);  // fp residual of mean(0.42...) only
    CHECK(s[6] == 0.0);
    CHECK(s[7] == 0.0);
}

TEST_CASE("build_feature_channels shape and zero propagation") {
    SUBCASE("six rows of the input length") {
        const auto eeg = pink_background(125 * 60, 3);
        const auto ac = build_feature_channels(eeg, 125.0, EventKind::Spindle);
        for (const auto& row : ac.channels) CHECK(row.size() == eeg.size());
    }
    SUBCASE("all-zero input gives all-zero rows") {
        const auto ac = build_feature_channels(std::vector<double>(125 * 30, 0.0), 125.0,
                                               EventKind::KComplex);
        for (const auto& row : ac.channels)
            for (double v : row) CHECK(v == 0.0);
    }
    SUBCASE("NaN is rejected") {
        std::vector<double> x(4000, 0.0);
        x[17] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(build_feature_channels(x, 125.0, EventKind::Spindle), std::invalid_argument);
    }
}

TEST_CASE("injected 12 Hz burst dominates the sigma-band row near its location") {
    synth::ScenarioSpec spec;
    spec.duration_s = 30.0;
    spec.seed = 5;
    spec.events.push_back({EventKind::Spindle, 10.0, 1.0, 0.0});
    const auto eeg = synth::gen_eeg(spec).ch[0].mixed();
    const auto filtered = filtfilt(design_butterworth_bandpass(5, 0.5, 35.0, 125.0), eeg);
    const auto ac = build_feature_channels(filtered, 125.0, EventKind::Spindle);
    const auto& band_b = ac.channels[2];
    const auto arg = static_cast<std::size_t>(
        std::max_element(band_b.begin(), band_b.end()) - band_b.begin());
    const double t = static_cast<double>(arg) / 125.0;
    CHECK(t > 9.5);
    CHECK(t < 11.5);
}

TEST_CASE("window_statistics window count formula") {
    AugmentedChannels ac;
    ac.fs_hz = 125.0;
    ac.kind = EventKind::Spindle;
    for (auto& ch : ac.channels) ch.assign(3750, 1.0);
    const auto fm = window_statistics(ac);
    CHECK(fm.rows.size() == 117);  // floor((3750-125)/31)+1
    REQUIRE(!fm.rows.empty());
    CHECK(fm.rows[0].size() == 60);
    CHECK(fm.schema_hash == feature_schema_hash(EventKind::Spindle, 1.0));
}

TEST_CASE("smote balancing") {
    SUBCASE("already balanced input is returned unchanged") {
        const auto fm = blobs(100, 11);
        const auto out = smote_balance(fm, 5, 42);
        CHECK(out.rows.size() == fm.rows.size());
    }
    SUBCASE("100/20 balances to 100/100 with collinear synthetics") {
        auto fm = blobs(100, 12);
        fm.rows.resize(120);
        fm.labels.resize(120);  // 100 negatives, 20 positives
        const auto out = smote_balance(fm, 5, 42);
        std::size_t pos = 0, neg = 0;
        for (int l : out.labels) (l ? pos : neg)++;
        CHECK(pos == 100);
        CHECK(neg == 100);

        std::vector<std::size_t> minority;
        for (std::size_t i = 0; i < 120; ++i)
            if (fm.labels[i] == 1) minority.push_back(i);
        for (std::size_t i = 120; i < out.rows.size(); ++i) {
            double best = 1e300;
            for (std::size_t a = 0; a < minority.size(); ++a)
                for (std::size_t b = a + 1; b < minority.size(); ++b)
                    best = std::min(best, dist_point_to_segment(out.rows[i], fm.rows[minority[a]],
                                                                fm.rows[minority[b]]));
            CHECK(best < 1e-9);
        }
    }
    SUBCASE("determinism under a fixed seed") {
        auto fm = blobs(60, 13);
        fm.rows.resize(90);
        fm.labels.resize(90);
        const auto a = smote_balance(fm, 5, 7);
        const auto b = smote_balance(fm, 5, 7);
        CHECK(a.rows == b.rows);
        CHECK(a.labels == b.labels);
    }
    SUBCASE("tiny minority reduces k and surfaces a warning") {
        auto fm = blobs(30, 14);
        fm.rows.resize(34);
        fm.labels.resize(34);  // 30 / 4
        std::string warning;
        const auto out = smote_balance(fm, 5, 9, &warning);
        CHECK(!warning.empty());
        std::size_t pos = 0;
        for (int l : out.labels) pos += l;
        CHECK(pos == 30);
    }
    SUBCASE("single-class input throws") {
        FeatureMatrix fm = blobs(10, 15);
        fm.labels.assign(fm.rows.size(), 0);
        CHECK_THROWS_AS(smote_balance(fm, 5, 1), std::invalid_argument);
    }
}

TEST_CASE("random forest on separable blobs") {
    const auto fm = blobs(100, 21);
    const auto model = train_forest(fm, 50, 77);

    SUBCASE("training accuracy 1.0") {
        const auto preds = predict(model, fm);
        for (std::size_t i = 0; i < preds.size(); ++i) CHECK(preds[i].label == fm.labels[i]);
    }
    SUBCASE("deterministic under the seed") {
        const auto again = train_forest(fm, 50, 77);
        const auto held_out = blobs(40, 22);
        const auto a = predict(model, held_out);
        const auto b = predict(again, held_out);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].label == b[i].label);
            CHECK(a[i].positive_fraction == b[i].positive_fraction);
        }
    }
    SUBCASE("single-class labels and tiny sets are rejected") {
        auto bad = fm;
        bad.labels.assign(bad.rows.size(), 1);
        CHECK_THROWS_AS(train_forest(bad, 10, 1), std::invalid_argument);
        auto tiny = blobs(3, 23);
        CHECK_THROWS_AS(train_forest(tiny, 10, 1), std::invalid_argument);
    }
    SUBCASE("schema mismatch is rejected at predict time") {
        auto other = blobs(20, 24);
        other.schema_hash ^= 0xdeadbeef;
        CHECK_THROWS_AS(predict(model, other), std::invalid_argument);
    }
    SUBCASE("empty feature matrix predicts nothing") {
        FeatureMatrix empty;
        empty.kind = EventKind::Spindle;
        empty.schema_hash = model.schema_hash;
        CHECK(predict(model, empty).empty());
    }
    SUBCASE("identical rows get identical predictions") {
        auto rows = blobs(20, 25);
        rows.labels.clear();
        for (auto& r : rows.rows) r = rows.rows[0];
        const auto preds = predict(model, rows);
        for (const auto& p : preds) {
            CHECK(p.label == preds[0].label);
            CHECK(p.positive_fraction == preds[0].positive_fraction);
        }
    }
    SUBCASE("JSON round-trip preserves behaviour") {
        namespace fs = std::filesystem;
        const auto path = (fs::temp_directory_path() / "somno_model_test.json").string();
        save_model(model, path);
        const auto loaded = load_model(path);
        CHECK(loaded.n_trees == model.n_trees);
        CHECK(loaded.seed == model.seed);
        CHECK(loaded.schema_hash == model.schema_hash);
        const auto held_out = blobs(30, 26);
        const auto a = predict(model, held_out);
        const auto b = predict(loaded, held_out);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].positive_fraction == b[i].positive_fraction);
    }
}

TEST_CASE("window truth labels honour the half-overlap tie rule") {
    // fs 100, win 100 samples (1 s), hop 25: window 0 covers [0,1) s
    std::vector<EventInterval> events = {{EventKind::Spindle, 0.5, 1.5}};  // overlaps [0.5,1) = 50%
    auto labels = window_truth_labels(events, EventKind::Spindle, 4, 100.0, 100, 25);
    CHECK(labels[0] == 1);  // exactly half counts as positive

    events[0].start_s = 0.501;  // 49.9% overlap
    labels = window_truth_labels(events, EventKind::Spindle, 4, 100.0, 100, 25);
    CHECK(labels[0] == 0);

    events[0].start_s = 0.499;  // 50.1% overlap
    labels = window_truth_labels(events, EventKind::Spindle, 4, 100.0, 100, 25);
    CHECK(labels[0] == 1);
}

TEST_CASE("merge_positive_windows clamps and flags durations") {
    // fs 125, win 125, hop 31
    SUBCASE("single positive window is 1 s: kept") {
        std::vector<int> labels(40, 0);
        labels[10] = 1;
        const auto events = merge_positive_windows(labels, 125.0, 125, 31);
        REQUIRE(events.size() == 1);
        CHECK(events[0].interval.duration() == doctest::Approx(1.0));
        CHECK(!events[0].overlong);
    }
    SUBCASE("long positive run is reported as-is but flagged") {
        std::vector<int> labels(40, 1);
        const auto events = merge_positive_windows(labels, 125.0, 125, 31);
        REQUIRE(events.size() == 1);
        CHECK(events[0].overlong);
        CHECK(events[0].interval.duration() > 3.0);
    }
    SUBCASE("gap larger than the merge gap splits events") {
        std::vector<int> labels(60, 0);
        labels[5] = 1;
        labels[40] = 1;  // 35 hops apart = 8.7 s gap
        const auto events = merge_positive_windows(labels, 125.0, 125, 31);
        CHECK(events.size() == 2);
    }
    SUBCASE("results are disjoint and time-ordered") {
        Rng rng(31);
        std::vector<int> labels(200);
        for (auto& l : labels) l = rng.uniform() < 0.3;
        const auto events = merge_positive_windows(labels, 125.0, 125, 31);
        for (std::size_t i = 1; i < events.size(); ++i)
            CHECK(events[i].interval.start_s > events[i - 1].interval.end_s);
    }
}

TEST_CASE("end-to-end spindle detection on synthetic nights") {
    // train on one synthetic stretch, detect on a disjoint one
    synth::ScenarioSpec train_spec;
    train_spec.duration_s = 240.0;
    train_spec.seed = 101;
    for (int i = 0; i < 20; ++i)
        train_spec.events.push_back({EventKind::Spindle, 5.0 + 11.5 * i, 0.0, 0.0});

    synth::ScenarioSpec test_spec = train_spec;
    test_spec.seed = 202;
    test_spec.events.clear();
    for (int i = 0; i < 10; ++i)
        test_spec.events.push_back({EventKind::Spindle, 8.0 + 22.0 * i, 0.0, 0.0});

    const FilterSpec bp = design_butterworth_bandpass(5, 0.5, 35.0, 125.0);
    auto featurize = [&](const synth::ScenarioSpec& spec, FeatureMatrix& fm) {
        const auto gen = synth::gen_eeg(spec);
        const auto filtered = filtfilt(bp, gen.ch[0].mixed());
        const auto ac = build_feature_channels(filtered, 125.0, EventKind::Spindle);
        fm = window_statistics(ac);
        const auto win = static_cast<std::size_t>(std::llround(125.0));
        fm.labels = window_truth_labels(gen.events, EventKind::Spindle, fm.rows.size(), 125.0, win, 31);
    };

    FeatureMatrix train_fm, test_fm;
    featurize(train_spec, train_fm);
    featurize(test_spec, test_fm);

    const auto balanced = smote_balance(train_fm, 5, 7);
    const auto model = train_forest(balanced, 100, 7);

    SUBCASE("at least 8 of 10 events recovered with midpoints within 0.5 s") {
        const auto events = detect_events(synth::gen_eeg(test_spec).ch[0].mixed(), 125.0, model,
                                          EventKind::Spindle);
        const auto truth = synth::gen_eeg(test_spec).events;
        int hits = 0;
        for (const auto& tru : truth) {
            for (const auto& det : events)
                if (std::abs(det.interval.midpoint() - tru.midpoint()) <= 0.5) {
                    ++hits;
                    break;
                }
        }
        CHECK(hits >= 8);

        // detected intervals are disjoint and ordered
        for (std::size_t i = 1; i < events.size(); ++i)
            CHECK(events[i].interval.start_s > events[i - 1].interval.end_s);
    }
    SUBCASE("pure background yields few positive windows") {
        synth::ScenarioSpec noise_spec = test_spec;
        noise_spec.events.clear();
        noise_spec.seed = 303;
        const auto labels = detect_event_windows(synth::gen_eeg(noise_spec).ch[0].mixed(), 125.0,
                                                 model, EventKind::Spindle);
        REQUIRE(!labels.empty());
        double positives = 0;
        for (int l : labels) positives += l;
        CHECK(positives / static_cast<double>(labels.size()) <= 0.15);
    }
    SUBCASE("zero-length signal detects nothing") {
        CHECK(detect_events({}, 125.0, model, EventKind::Spindle).empty());
    }
    SUBCASE("kind mismatch is rejected") {
        CHECK_THROWS_AS(detect_events(pink_background(8000, 9), 125.0, model, EventKind::KComplex),
                        std::invalid_argument);
    }
}

TEST_CASE("evaluate_detector formulas") {
    SUBCASE("perfect predictions") {
        std::vector<int> y = {0, 1, 0, 1, 1};
        const auto s = evaluate_detector(y, y);
        CHECK(s.sensitivity == 1.0);
        CHECK(s.specificity == 1.0);
        CHECK(s.accuracy == 1.0);
    }
    SUBCASE("all-negative predictions on 10% positive truth") {
        std::vector<int> truth(100, 0), pred(100, 0);
        for (int i = 0; i < 10; ++i) truth[i] = 1;
        const auto s = evaluate_detector(pred, truth);
        CHECK(s.sensitivity == 0.0);
        CHECK(s.specificity == 1.0);
        CHECK(s.accuracy == doctest::Approx(0.9));
    }
    SUBCASE("worked counts TP=78 FN=22 TN=85 FP=15") {
        std::vector<int> truth, pred;
        auto fill = [&](int t, int p, int n) {
            for (int i = 0; i < n; ++i) {
                truth.push_back(t);
                pred.push_back(p);
            }
        };
        fill(1, 1, 78);
        fill(1, 0, 22);
        fill(0, 0, 85);
        fill(0, 1, 15);
        const auto s = evaluate_detector(pred, truth);
        CHECK_ABS(s.sensitivity, 0.78, 1e-12);
        CHECK_ABS(s.specificity, 0.85, 1e-12);
    }
    SUBCASE("length mismatch throws") {
        CHECK_THROWS_AS(evaluate_detector({1, 0}, {1}), std::invalid_argument);
    }
}
