// somno — batch analysis CLI for textile sleep-mask recordings.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "somno/acquisition.hpp"
#include "somno/dsp.hpp"
#include "somno/metrics.hpp"
#include "somno/microevent.hpp"
#include "somno/physio.hpp"
#include "somno/recording.hpp"
#include "somno/synth.hpp"

namespace {

using namespace somno;

bool g_verbose = false;

void note(const std::string& msg) {
    if (g_verbose) std::cerr << "somno: " << msg << '\n';
}

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void write_rate_csv(const RateSeries& series, const std::string& path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (path != "-") {
        file = open_or_throw(path);
        out = &file;
    }
    *out << "time_s,value,quality\n";
    char buf[96];
    for (const auto& p : series) {
        if (std::isnan(p.value))
            std::snprintf(buf, sizeof(buf), "%.6f,NaN,%.6f\n", p.time_s, p.quality);
        else
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", p.time_s, p.value, p.quality);
        *out << buf;
    }
}

BaselineCalibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    BaselineCalibration calib;
    for (int c = 0; c < 3; ++c) {
        calib.seated_mean_v[c] = j.at("seated_mean_v").at(c).get<double>();
        calib.stationary_variance[c] = j.at("stationary_variance").at(c).get<double>();
    }
    return calib;
}

void save_calibration(const BaselineCalibration& calib, const std::string& path) {
    nlohmann::json j;
    j["seated_mean_v"] = calib.seated_mean_v;
    j["stationary_variance"] = calib.stationary_variance;
    open_or_throw(path) << j.dump(2) << '\n';
}

// ---- features.bin ----------------------------------------------------------

constexpr char kFeatureMagic[4] = {'S', 'M', 'F', '1'};

void save_features(const FeatureMatrix& fm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto put = [&out](const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    out.write(kFeatureMagic, 4);
    const std::uint32_t version = 1;
    put(&version, 4);
    const std::uint8_t kind = fm.kind == EventKind::Spindle ? 0 : 1;
    const std::uint8_t has_labels = fm.has_labels() ? 1 : 0;
    const std::uint16_t reserved = 0;
    put(&kind, 1);
    put(&has_labels, 1);
    put(&reserved, 2);
    const std::uint64_t n_rows = fm.rows.size();
    const std::uint64_t n_cols = fm.rows.empty() ? kFeatureColumns : fm.rows[0].size();
    put(&n_rows, 8);
    put(&n_cols, 8);
    put(&fm.window_len_s, 8);
    put(&fm.hop_s, 8);
    put(&fm.schema_hash, 8);
    for (const auto& row : fm.rows) put(row.data(), 8 * row.size());
    if (fm.has_labels())
        for (int l : fm.labels) {
            const std::uint8_t b = static_cast<std::uint8_t>(l);
            put(&b, 1);
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

FeatureMatrix load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto get = [&in, &path](void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in) throw std::runtime_error(path + ": truncated feature file");
    };
    char magic[4];
    get(magic, 4);
    if (std::memcmp(magic, kFeatureMagic, 4) != 0)
        throw std::runtime_error(path + ": not a feature file");
    std::uint32_t version;
    get(&version, 4);
    if (version != 1) throw std::runtime_error(path + ": unsupported feature file version");
    std::uint8_t kind, has_labels;
    std::uint16_t reserved;
    get(&kind, 1);
    get(&has_labels, 1);
    get(&reserved, 2);
    FeatureMatrix fm;
    fm.kind = kind == 0 ? EventKind::Spindle : EventKind::KComplex;
    std::uint64_t n_rows, n_cols;
    get(&n_rows, 8);
    get(&n_cols, 8);
    get(&fm.window_len_s, 8);
    get(&fm.hop_s, 8);
    get(&fm.schema_hash, 8);
    fm.rows.assign(n_rows, std::vector<double>(n_cols));
    for (auto& row : fm.rows) get(row.data(), 8 * n_cols);
    if (has_labels) {
        fm.labels.resize(n_rows);
        for (auto& l : fm.labels) {
            std::uint8_t b;
            get(&b, 1);
            l = b;
        }
    }
    return fm;
}

std::vector<FastChannel> parse_channel_list(const std::string& csv) {
    std::vector<FastChannel> out;
    std::string item;
    std::stringstream ss(csv);
    while (std::getline(ss, item, ',')) out.push_back(fast_channel_from_name(item));
    if (out.empty()) throw std::invalid_argument("empty channel list");
    return out;
}

// ---- subcommand bodies -----------------------------------------------------

int run_synth(const std::string& scenario_path, const std::string& out_dir, std::int64_t seed) {
    auto spec = synth::load_scenario(scenario_path);
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    synth::write_bundle(spec, out_dir);
    note("bundle written to " + out_dir);
    return 0;
}

int run_encode(const std::string& rec_dir, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    const auto bytes = encode_frames(rec);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    note(std::to_string(bytes.size()) + " bytes");
    return 0;
}

int run_decode(const std::string& in_path, const std::string& out_dir) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + in_path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    auto [rec, report] = decode_stream(bytes);
    save_recording(rec, out_dir);

    nlohmann::json j;
    j["frames_ok"] = report.frames_ok;
    j["frames_corrupt"] = report.frames_corrupt;
    j["frames_lost"] = report.frames_lost;
    j["samples_lost"] = report.samples_lost;
    open_or_throw((std::filesystem::path(out_dir) / "loss_report.json").string()) << j.dump(2) << '\n';
    std::cout << j.dump() << '\n';
    return 0;
}

int run_hr(const std::string& rec_dir, const std::string& mode_name, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    HrOptions opts;
    opts.mode = hr_mode_from_name(mode_name);
    if (opts.mode == HrMode::NoPcaPressedPatch) {
        // pressed patch = lowest mean pressure-baseline voltage
        int best = 0;
        double best_mean = std::numeric_limits<double>::infinity();
        for (int c = 0; c < kNumSlowChannels; ++c) {
            const auto clean = interpolate_nans(rec.slow[c]);
            double mu = 0.0;
            for (double v : clean) mu += v;
            mu /= static_cast<double>(clean.empty() ? 1 : clean.size());
            if (mu < best_mean) {
                best_mean = mu;
                best = c;
            }
        }
        opts.pressed_patch = best;
        note("pressed patch inferred as p" + std::to_string(best + 1));
    }
    const std::array<std::vector<double>, 3> bcg = {rec.fast_channel(FastChannel::BcgP1),
                                                    rec.fast_channel(FastChannel::BcgP2),
                                                    rec.fast_channel(FastChannel::BcgP3)};
    write_rate_csv(estimate_heart_rate(bcg, rec.fast_rate_hz, opts), out_path);
    return 0;
}

int run_resp(const std::string& rec_dir, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    write_rate_csv(estimate_respiration(rec.slow, rec.slow_rate.hz()), out_path);
    return 0;
}

int run_posture(const std::string& rec_dir, const std::string& calib_path, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    const auto calib = load_calibration(calib_path);
    const auto blocks = classify_posture(rec, calib);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (out_path != "-") {
        file = open_or_throw(out_path);
        out = &file;
    }
    *out << "time_s,value,quality\n";
    char buf[96];
    for (const auto& b : blocks) {
        std::snprintf(buf, sizeof(buf), "%.6f,%s,%.6f\n", b.time_s, to_string(b.posture), b.max_delta_v);
        *out << buf;
    }
    return 0;
}

int run_movement(const std::string& rec_dir, const std::string& calib_path,
                 const std::string& out_path, const std::string& severity_json) {
    const auto rec = load_recording(rec_dir);
    const auto calib = load_calibration(calib_path);
    const auto events = detect_movement(rec, calib);

    std::vector<EventInterval> intervals;
    for (const auto& ev : events) intervals.push_back(ev.interval);
    save_events(intervals, out_path);

    if (!severity_json.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& ev : events)
            j.push_back({{"start_s", ev.interval.start_s},
                         {"end_s", ev.interval.end_s},
                         {"severity", to_string(ev.severity)}});
        open_or_throw(severity_json) << j.dump(2) << '\n';
    }
    note(std::to_string(events.size()) + " movement intervals");
    return 0;
}

int run_calibrate(const std::string& rec_dir, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    save_calibration(calibrate_seated_baseline(rec), out_path);
    return 0;
}

int run_features(const std::string& rec_dir, const std::string& kind_name,
                 const std::string& events_path, const std::string& out_path,
                 const std::string& channels) {
    const auto rec = load_recording(rec_dir);
    const EventKind kind = event_kind_from_name(kind_name);
    const auto events = load_events(events_path);

    std::vector<FastChannel> chans;
    if (channels == "both")
        chans = {FastChannel::EegL, FastChannel::EegR};
    else
        chans = parse_channel_list(channels);

    FeatureMatrix all;
    const FilterSpec bp = design_butterworth_bandpass(5, 0.5, 35.0, rec.fast_rate_hz);
    for (FastChannel c : chans) {
        auto x = preprocess(rec.fast_channel(c), rec.fast_rate_hz);
        x = filtfilt(bp, x);
        const auto ac = build_feature_channels(x, rec.fast_rate_hz, kind);
        auto fm = window_statistics(ac);
        const auto win = static_cast<std::size_t>(std::llround(fm.window_len_s * rec.fast_rate_hz));
        const auto hop = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(fm.hop_s * rec.fast_rate_hz)));
        const auto labels = window_truth_labels(events, kind, fm.rows.size(), rec.fast_rate_hz, win, hop);
        if (all.rows.empty()) {
            all = fm;
            all.labels = labels;
        } else {
            all.rows.insert(all.rows.end(), fm.rows.begin(), fm.rows.end());
            all.labels.insert(all.labels.end(), labels.begin(), labels.end());
        }
    }
    save_features(all, out_path);
    note(std::to_string(all.rows.size()) + " feature rows");
    return 0;
}

int run_train(const std::string& features_path, const std::string& out_path, std::uint64_t seed,
              std::size_t n_trees) {
    auto fm = load_features(features_path);
    if (!fm.has_labels()) throw std::runtime_error("training features carry no labels");
    std::string warning;
    const auto balanced = smote_balance(fm, 5, seed, &warning);
    if (!warning.empty()) std::cerr << "somno: " << warning << '\n';
    note("rows " + std::to_string(fm.rows.size()) + " -> " + std::to_string(balanced.rows.size()) +
         " after SMOTE");
    const auto model = train_forest(balanced, n_trees, seed);
    save_model(model, out_path);
    return 0;
}

int run_detect(const std::string& rec_dir, const std::string& model_path, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    const auto model = load_model(model_path);

    // fuse the two EEG channels: a window is positive if either channel says so
    std::vector<int> fused;
    for (FastChannel c : {FastChannel::EegL, FastChannel::EegR}) {
        const auto x = preprocess(rec.fast_channel(c), rec.fast_rate_hz);
        const auto labels = detect_event_windows(x, rec.fast_rate_hz, model, model.kind);
        if (fused.empty())
            fused = labels;
        else
            for (std::size_t i = 0; i < std::min(fused.size(), labels.size()); ++i)
                fused[i] = fused[i] || labels[i];
    }

    const auto win = static_cast<std::size_t>(std::llround(1.0 * rec.fast_rate_hz));
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.25 * rec.fast_rate_hz)));
    auto detected = merge_positive_windows(fused, rec.fast_rate_hz, win, hop);

    std::vector<EventInterval> intervals;
    for (auto& ev : detected) {
        ev.interval.kind = model.kind;
        intervals.push_back(ev.interval);
    }
    save_events(intervals, out_path);
    note(std::to_string(intervals.size()) + " events");
    return 0;
}

int run_quality(const std::string& rec_dir, const std::string& ref_dir, const std::string& metric,
                const std::string& channels, const std::string& out_path) {
    const auto rec = load_recording(rec_dir);
    const auto ref = load_recording(ref_dir);
    const auto chans = channels == "all"
                           ? std::vector<FastChannel>{FastChannel::EegL, FastChannel::EegR,
                                                      FastChannel::EogL, FastChannel::EogR}
                           : parse_channel_list(channels);

    nlohmann::json j;
    j["metric"] = metric;
    auto& per_channel = j["channels"];
    for (FastChannel c : chans) {
        auto a = interpolate_nans(rec.fast_channel(c));
        auto b = interpolate_nans(ref.fast_channel(c));
        const std::size_t n = std::min(a.size(), b.size());
        a.resize(n);
        b.resize(n);
        if (metric == "zncc") {
            nlohmann::json cj;
            cj["value"] = zncc(a, b);
            const auto epoch = static_cast<std::size_t>(std::llround(30.0 * rec.fast_rate_hz));
            auto& epochs = cj["epochs"] = nlohmann::json::array();
            for (std::size_t s = 0; s + epoch <= n; s += epoch) {
                std::vector<double> wa(a.begin() + s, a.begin() + s + epoch);
                std::vector<double> wb(b.begin() + s, b.begin() + s + epoch);
                epochs.push_back(zncc(wa, wb));
            }
            per_channel[to_string(c)] = cj;
        } else if (metric == "coherence") {
            const auto report = msc_coherence(a, b, rec.fast_rate_hz);
            nlohmann::json cj;
            auto& bands = cj["band_means"];
            auto& labels = cj["band_labels"];
            for (const auto& band : report.bands) {
                bands[band.name] = band.mean;
                labels[band.name] = to_string(band.label);
            }
            per_channel[to_string(c)] = cj;
        } else {
            throw CLI::ValidationError("--metric must be zncc or coherence");
        }
    }

    if (out_path == "-")
        std::cout << j.dump(2) << '\n';
    else
        open_or_throw(out_path) << j.dump(2) << '\n';
    return 0;
}

int run_kappa(const std::string& a_path, const std::string& b_path) {
    const auto a = load_stages(a_path);
    const auto b = load_stages(b_path);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "kappa=%.3f\n", cohens_kappa(a, b));
    std::cout << buf;
    return 0;
}

int run_scores(const std::string& truth_path, const std::string& pred_path, const std::string& out_path) {
    const auto truth = load_stages(truth_path);
    const auto pred = load_stages(pred_path);
    std::vector<int> t(truth.stages.size()), p(pred.stages.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<int>(truth.stages[i]);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(pred.stages[i]);

    const std::vector<std::string> classes = {"W", "L", "D", "R"};
    const auto [cm, scores] = confusion_and_scores(t, p, classes);

    nlohmann::json j;
    j["classes"] = classes;
    j["epochs"] = cm.total();
    j["confusion"] = cm.counts;
    auto& per_class = j["per_class"];
    for (std::size_t c = 0; c < classes.size(); ++c) {
        per_class[classes[c]] = {{"accuracy", scores[c].accuracy},
                                 {"precision", scores[c].precision},
                                 {"recall", scores[c].recall},
                                 {"f1", scores[c].f1},
                                 {"degenerate", scores[c].degenerate}};
    }
    if (out_path == "-")
        std::cout << j.dump(2) << '\n';
    else
        open_or_throw(out_path) << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"somno — sleep-mask recording analysis toolkit"};
    app.require_subcommand(1);
    app.add_flag("--verbose", g_verbose, "chatty progress notes on stderr");
    std::int64_t global_seed = -1;
    app.add_option("--seed", global_seed, "override the scenario / training seed");

    // synth
    std::string scn_path, out_dir = "out";
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic recording bundle");
    synth_cmd->add_option("--scenario", scn_path, "scenario JSON")->required();
    synth_cmd->add_option("--out", out_dir, "output bundle directory")->required();

    // encode / decode
    std::string rec_dir, stream_path;
    auto* encode_cmd = app.add_subcommand("encode", "serialize a recording into a .pmk stream");
    encode_cmd->add_option("--rec", rec_dir, "recording bundle directory")->required();
    encode_cmd->add_option("--out", stream_path, "output .pmk path")->required();

    std::string dec_in, dec_out;
    auto* decode_cmd = app.add_subcommand("decode", "decode a .pmk stream into a bundle");
    decode_cmd->add_option("--in", dec_in, "input .pmk path")->required();
    decode_cmd->add_option("--out", dec_out, "output bundle directory")->required();

    // physiology
    std::string hr_rec, hr_mode = "full", hr_out = "-";
    auto* hr_cmd = app.add_subcommand("hr", "heart-rate series from the pressure patches");
    hr_cmd->add_option("--rec", hr_rec)->required();
    hr_cmd->add_option("--mode", hr_mode, "full | no-pca-best | no-pca-pressed");
    hr_cmd->add_option("--out", hr_out, "output CSV ('-' = stdout)");

    std::string resp_rec, resp_out = "-";
    auto* resp_cmd = app.add_subcommand("resp", "respiration-rate series");
    resp_cmd->add_option("--rec", resp_rec)->required();
    resp_cmd->add_option("--out", resp_out);

    std::string post_rec, post_calib, post_out = "-";
    auto* post_cmd = app.add_subcommand("posture", "head posture per 10-s block");
    post_cmd->add_option("--rec", post_rec)->required();
    post_cmd->add_option("--calib", post_calib, "calibration JSON")->required();
    post_cmd->add_option("--out", post_out);

    std::string mov_rec, mov_calib, mov_out = "movement.csv", mov_json;
    auto* mov_cmd = app.add_subcommand("movement", "gross-movement intervals");
    mov_cmd->add_option("--rec", mov_rec)->required();
    mov_cmd->add_option("--calib", mov_calib)->required();
    mov_cmd->add_option("--out", mov_out, "events CSV output");
    mov_cmd->add_option("--severity-json", mov_json, "optional severity report");

    std::string cal_rec, cal_out = "calib.json";
    auto* cal_cmd = app.add_subcommand("calibrate", "seated baseline calibration");
    cal_cmd->add_option("--rec", cal_rec, "seated recording bundle")->required();
    cal_cmd->add_option("--out", cal_out);

    // microevents
    std::string feat_rec, feat_kind, feat_events, feat_out, feat_channels = "both";
    auto* feat_cmd = app.add_subcommand("features", "windowed feature extraction");
    feat_cmd->add_option("--rec", feat_rec)->required();
    feat_cmd->add_option("--kind", feat_kind, "spindle | kcomplex")->required();
    feat_cmd->add_option("--events", feat_events, "truth events.csv for labels")->required();
    feat_cmd->add_option("--out", feat_out, "features.bin output")->required();
    feat_cmd->add_option("--channel", feat_channels, "eeg_l | eeg_r | both");

    std::string train_features, train_out;
    std::size_t train_trees = 100;
    auto* train_cmd = app.add_subcommand("train", "SMOTE + random-forest training");
    train_cmd->add_option("--features", train_features)->required();
    train_cmd->add_option("--out", train_out, "model JSON output")->required();
    train_cmd->add_option("--trees", train_trees);

    std::string det_rec, det_model, det_out;
    auto* det_cmd = app.add_subcommand("detect", "detect events with a trained model");
    det_cmd->add_option("--rec", det_rec)->required();
    det_cmd->add_option("--model", det_model)->required();
    det_cmd->add_option("--out", det_out, "events CSV output")->required();

    // metrics
    std::string q_rec, q_ref, q_metric, q_channels = "all", q_out = "-";
    auto* q_cmd = app.add_subcommand("quality", "signal-quality metrics vs a reference bundle");
    q_cmd->add_option("--rec", q_rec)->required();
    q_cmd->add_option("--ref", q_ref)->required();
    q_cmd->add_option("--metric", q_metric, "zncc | coherence")->required();
    q_cmd->add_option("--channels", q_channels, "comma list or 'all'");
    q_cmd->add_option("--out", q_out);

    std::string kap_a, kap_b;
    auto* kap_cmd = app.add_subcommand("kappa", "Cohen's kappa between two hypnograms");
    kap_cmd->add_option("--a", kap_a)->required();
    kap_cmd->add_option("--b", kap_b)->required();

    std::string sc_truth, sc_pred, sc_out = "-";
    auto* sc_cmd = app.add_subcommand("scores", "confusion matrix and per-stage scores");
    sc_cmd->add_option("--truth", sc_truth)->required();
    sc_cmd->add_option("--pred", sc_pred)->required();
    sc_cmd->add_option("--out", sc_out);

    // global flags (--seed, --verbose) are accepted after any subcommand
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(scn_path, out_dir, global_seed);
        if (encode_cmd->parsed()) return run_encode(rec_dir, stream_path);
        if (decode_cmd->parsed()) return run_decode(dec_in, dec_out);
        if (hr_cmd->parsed()) return run_hr(hr_rec, hr_mode, hr_out);
        if (resp_cmd->parsed()) return run_resp(resp_rec, resp_out);
        if (post_cmd->parsed()) return run_posture(post_rec, post_calib, post_out);
        if (mov_cmd->parsed()) return run_movement(mov_rec, mov_calib, mov_out, mov_json);
        if (cal_cmd->parsed()) return run_calibrate(cal_rec, cal_out);
        if (feat_cmd->parsed())
            return run_features(feat_rec, feat_kind, feat_events, feat_out, feat_channels);
        if (train_cmd->parsed())
            return run_train(train_features, train_out,
                             global_seed >= 0 ? static_cast<std::uint64_t>(global_seed) : 1, train_trees);
        if (det_cmd->parsed()) return run_detect(det_rec, det_model, det_out);
        if (q_cmd->parsed()) return run_quality(q_rec, q_ref, q_metric, q_channels, q_out);
        if (kap_cmd->parsed()) return run_kappa(kap_a, kap_b);
        if (sc_cmd->parsed()) return run_scores(sc_truth, sc_pred, sc_out);
    } catch (const std::exception& e) {
        std::cerr << "somno: error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
