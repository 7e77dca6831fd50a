// The OpenMP kernels must be bit-identical to their serial references.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "somno/dsp.hpp"
#include "somno/microevent.hpp"
#include "somno/physio.hpp"
#include "somno/rng.hpp"
#include "somno/spectral.hpp"
#include "somno/synth.hpp"

using namespace somno;

namespace {

synth::ScenarioSpec workload() {
    synth::ScenarioSpec spec;
    spec.duration_s = 120.0;
    spec.seed = 5;
    for (int i = 0; i < 8; ++i) spec.events.push_back({EventKind::Spindle, 4.0 + 14.0 * i, 0.0, 0.0});
    return spec;
}

} // namespace

TEST_CASE("stft parallel == serial") {
    const auto eeg = synth::gen_eeg(workload()).ch[0].mixed();
    const auto a = stft_serial(eeg, 125.0, 64, 16);
    const auto b = stft(eeg, 125.0, 64, 16);
    REQUIRE(a.power.size() == b.power.size());
    CHECK(a.times_s == b.times_s);
    for (std::size_t f = 0; f < a.power.size(); ++f) CHECK(a.power[f] == b.power[f]);
}

TEST_CASE("build_feature_channels parallel == serial") {
    const auto eeg = synth::gen_eeg(workload()).ch[0].mixed();
    const auto a = build_feature_channels_serial(eeg, 125.0, EventKind::Spindle);
    const auto b = build_feature_channels(eeg, 125.0, EventKind::Spindle);
    for (int c = 0; c < 6; ++c) CHECK(a.channels[c] == b.channels[c]);
}

TEST_CASE("window_statistics parallel == serial") {
    const auto eeg = synth::gen_eeg(workload()).ch[0].mixed();
    const auto ac = build_feature_channels_serial(eeg, 125.0, EventKind::Spindle);
    const auto a = window_statistics_serial(ac);
    const auto b = window_statistics(ac);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i] == b.rows[i]);
}

TEST_CASE("train_forest parallel == serial (same trees, same predictions)") {
    const auto eeg = synth::gen_eeg(workload()).ch[0].mixed();
    const auto ac = build_feature_channels_serial(eeg, 125.0, EventKind::Spindle);
    auto fm = window_statistics_serial(ac);
    Rng rng(3);
    fm.labels.resize(fm.rows.size());
    for (auto& l : fm.labels) l = rng.uniform() < 0.4;

    const auto ma = train_forest_serial(fm, 30, 9);
    const auto mb = train_forest(fm, 30, 9);
    REQUIRE(ma.trees.size() == mb.trees.size());
    for (std::size_t t = 0; t < ma.trees.size(); ++t) {
        REQUIRE(ma.trees[t].nodes.size() == mb.trees[t].nodes.size());
        for (std::size_t n = 0; n < ma.trees[t].nodes.size(); ++n) {
            CHECK(ma.trees[t].nodes[n].feature == mb.trees[t].nodes[n].feature);
            CHECK(ma.trees[t].nodes[n].threshold == mb.trees[t].nodes[n].threshold);
        }
    }

    const auto pa = predict_serial(ma, fm);
    const auto pb = predict(mb, fm);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        CHECK(pa[i].positive_fraction == pb[i].positive_fraction);
}

TEST_CASE("estimate_heart_rate parallel == serial") {
    const auto bcg = synth::gen_bcg(workload());
    const std::array<std::vector<double>, 3> ch = {bcg.ch[0].mixed(), bcg.ch[1].mixed(),
                                                   bcg.ch[2].mixed()};
    const auto a = estimate_heart_rate_serial(ch, 125.0);
    const auto b = estimate_heart_rate(ch, 125.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::isnan(a[i].value) == std::isnan(b[i].value));
        if (!std::isnan(a[i].value)) CHECK(a[i].value == b[i].value);
        CHECK(a[i].quality == b[i].quality);
    }
}

TEST_CASE("preprocess parallel == serial") {
    auto eeg = synth::gen_eeg(workload()).ch[0].mixed();
    eeg[100] = std::numeric_limits<double>::quiet_NaN();
    eeg[5000] += 5.0;  // a spike for the outlier stage to chew on
    const auto a = preprocess_serial(eeg, 125.0);
    const auto b = preprocess(eeg, 125.0);
    CHECK(a == b);
}
