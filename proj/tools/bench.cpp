// Benchmarks the OpenMP kernels against their serial reference implementations
// and reports the largest output deviation (expected: exactly zero).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "somno/dsp.hpp"
#include "somno/microevent.hpp"
#include "somno/physio.hpp"
#include "somno/rng.hpp"
#include "somno/spectral.hpp"
#include "somno/synth.hpp"

using namespace somno;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Result {
    double serial_s = 0.0;
    double parallel_s = 0.0;
    double max_abs_diff = 0.0;
};

void report(const char* name, const Result& r) {
    std::printf("%-24s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   max|diff| %.3g\n", name,
                r.serial_s, r.parallel_s, r.parallel_s > 0.0 ? r.serial_s / r.parallel_s : 0.0,
                r.max_abs_diff);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (!std::isnan(d)) m = std::max(m, d);
    }
    return m;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif

    synth::ScenarioSpec scenario;
    scenario.duration_s = 600.0;
    scenario.seed = 7;
    for (int i = 0; i < 40; ++i)
        scenario.events.push_back({EventKind::Spindle, 4.0 + 14.7 * i, 0.0, 30.0});

    const auto eeg = synth::gen_eeg(scenario).ch[0].mixed();
    const auto bcg = synth::gen_bcg(scenario);
    const std::array<std::vector<double>, 3> bcg_ch = {bcg.ch[0].mixed(), bcg.ch[1].mixed(),
                                                       bcg.ch[2].mixed()};

    {
        Result r;
        double t0 = now_s();
        const auto a = stft_serial(eeg, 125.0, 64, 16);
        r.serial_s = now_s() - t0;
        t0 = now_s();
        const auto b = stft(eeg, 125.0, 64, 16);
        r.parallel_s = now_s() - t0;
        for (std::size_t f = 0; f < a.power.size(); ++f)
            r.max_abs_diff = std::max(r.max_abs_diff, max_diff(a.power[f], b.power[f]));
        report("stft", r);
    }

    {
        Result r;
        double t0 = now_s();
        const auto a = build_feature_channels_serial(eeg, 125.0, EventKind::Spindle);
        r.serial_s = now_s() - t0;
        t0 = now_s();
        const auto b = build_feature_channels(eeg, 125.0, EventKind::Spindle);
        r.parallel_s = now_s() - t0;
        for (int c = 0; c < 6; ++c)
            r.max_abs_diff = std::max(r.max_abs_diff, max_diff(a.channels[c], b.channels[c]));
        report("build_feature_channels", r);

        Result rw;
        t0 = now_s();
        const auto fa = window_statistics_serial(a);
        rw.serial_s = now_s() - t0;
        t0 = now_s();
        const auto fb = window_statistics(b);
        rw.parallel_s = now_s() - t0;
        for (std::size_t i = 0; i < fa.rows.size(); ++i)
            rw.max_abs_diff = std::max(rw.max_abs_diff, max_diff(fa.rows[i], fb.rows[i]));
        report("window_statistics", rw);

        // labelled copy for forest training
        auto labelled = fa;
        Rng rng(11);
        labelled.labels.resize(labelled.rows.size());
        for (std::size_t i = 0; i < labelled.rows.size(); ++i)
            labelled.labels[i] = rng.uniform() < 0.3 ? 1 : 0;

        Result rf;
        t0 = now_s();
        const auto ma = train_forest_serial(labelled, 50, 13);
        rf.serial_s = now_s() - t0;
        t0 = now_s();
        const auto mb = train_forest(labelled, 50, 13);
        rf.parallel_s = now_s() - t0;
        const auto pa = predict_serial(ma, fa);
        const auto pb = predict(mb, fb);
        for (std::size_t i = 0; i < pa.size(); ++i)
            rf.max_abs_diff =
                std::max(rf.max_abs_diff, std::abs(pa[i].positive_fraction - pb[i].positive_fraction));
        report("train_forest+predict", rf);
    }

    {
        Result r;
        double t0 = now_s();
        const auto a = estimate_heart_rate_serial(bcg_ch, 125.0);
        r.serial_s = now_s() - t0;
        t0 = now_s();
        const auto b = estimate_heart_rate(bcg_ch, 125.0);
        r.parallel_s = now_s() - t0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::isnan(a[i].value) != std::isnan(b[i].value)) r.max_abs_diff = 1e9;
            if (!std::isnan(a[i].value))
                r.max_abs_diff = std::max(r.max_abs_diff, std::abs(a[i].value - b[i].value));
        }
        report("estimate_heart_rate", r);
    }

    {
        Result r;
        double t0 = now_s();
        const auto a = preprocess_serial(eeg, 125.0);
        r.serial_s = now_s() - t0;
        t0 = now_s();
        const auto b = preprocess(eeg, 125.0);
        r.parallel_s = now_s() - t0;
        r.max_abs_diff = max_diff(a, b);
        report("preprocess", r);
    }

    return 0;
}
