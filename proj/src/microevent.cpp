#include "somno/microevent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "somno/dsp.hpp"
#include "somno/rng.hpp"
#include "somno/spectral.hpp"

namespace somno {

namespace {

constexpr double kEpochLenS = 30.0;
constexpr double kMergeGapS = 0.25;
constexpr double kMinEventS = 0.5;
constexpr double kMaxEventS = 3.0;

double percentile_linear(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double rank = p / 100.0 * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Derived rows for one epoch, each upsampled back to the epoch length with
// the anchors at their source-window centers.
std::array<std::vector<double>, 5> epoch_derived_rows(const std::vector<double>& epoch, double fs,
                                                      const MicroeventParams& p) {
    const std::size_t n = epoch.size();
    std::array<std::vector<double>, 5> rows;

    if (n < p.stft_seg_len || n < 8) {
        for (auto& r : rows) r.assign(n, 0.0);
        return rows;
    }

    {
        const auto tf = stft_serial(epoch, fs, p.stft_seg_len, p.stft_hop);
        const auto band_a = band_power_series(tf, p.band_a_lo, p.band_a_hi);
        const auto band_b = band_power_series(tf, p.band_b_lo, p.band_b_hi);
        std::vector<double> centers(tf.times_s.size());
        for (std::size_t i = 0; i < centers.size(); ++i) centers[i] = tf.times_s[i] * fs;
        rows[0] = upsample_linear(band_a, n, centers);
        rows[1] = upsample_linear(band_b, n, centers);
    }

    {
        const auto d = dwt2_db2(epoch);
        std::vector<double> centers2(d.ca2.size());
        for (std::size_t i = 0; i < centers2.size(); ++i)
            centers2[i] = 4.0 * static_cast<double>(i) + 4.5;  // level-2 support center
        rows[2] = upsample_linear(d.ca2, n, centers2);
        rows[3] = upsample_linear(d.cd2, n, centers2);
    }

    {
        const auto decomp = emd(epoch);
        if (!decomp.imfs.empty())
            rows[4] = decomp.imfs.front();
        else
            rows[4].assign(n, 0.0);
    }
    return rows;
}

AugmentedChannels build_feature_channels_impl(const std::vector<double>& eeg, double fs_hz,
                                              EventKind kind, bool parallel) {
    for (double v : eeg)
        if (std::isnan(v)) throw std::invalid_argument("build_feature_channels: NaN in input");

    const MicroeventParams p = microevent_params(kind);
    const std::size_t n = eeg.size();
    AugmentedChannels ac;
    ac.fs_hz = fs_hz;
    ac.kind = kind;
    ac.channels[0] = eeg;
    for (int r = 1; r < 6; ++r) ac.channels[r].assign(n, 0.0);

    const auto epoch_len = static_cast<std::size_t>(std::llround(kEpochLenS * fs_hz));
    std::vector<std::pair<std::size_t, std::size_t>> epochs;
    for (std::size_t start = 0; start < n; start += epoch_len)
        epochs.emplace_back(start, std::min(n, start + epoch_len));

    const auto n_epochs = static_cast<std::ptrdiff_t>(epochs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t e = 0; e < n_epochs; ++e) {
        const auto [lo, hi] = epochs[e];
        const std::vector<double> epoch(eeg.begin() + lo, eeg.begin() + hi);
        const auto rows = epoch_derived_rows(epoch, fs_hz, p);
        for (int r = 0; r < 5; ++r)
            std::copy(rows[r].begin(), rows[r].end(), ac.channels[r + 1].begin() + lo);
    }
    return ac;
}

FeatureMatrix window_statistics_impl(const AugmentedChannels& ac, double hop_s, bool parallel) {
    FeatureMatrix fm;
    fm.hop_s = hop_s;
    fm.kind = ac.kind;
    fm.schema_hash = feature_schema_hash(ac.kind, fm.window_len_s);

    const auto win = static_cast<std::size_t>(std::llround(fm.window_len_s * ac.fs_hz));
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(hop_s * ac.fs_hz)));
    const std::size_t n = ac.channels[0].size();
    if (n < win || win == 0) return fm;

    const std::size_t n_windows = (n - win) / hop + 1;
    fm.rows.assign(n_windows, std::vector<double>(kFeatureColumns, 0.0));

    const auto windows = static_cast<std::ptrdiff_t>(n_windows);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t w = 0; w < windows; ++w) {
        const std::size_t start = static_cast<std::size_t>(w) * hop;
        auto& row = fm.rows[w];
        for (int c = 0; c < 6; ++c) {
            const std::vector<double> slice(ac.channels[c].begin() + start,
                                            ac.channels[c].begin() + start + win);
            const auto stats = window_stats10(slice);
            std::copy(stats.begin(), stats.end(), row.begin() + c * kStatsPerChannel);
        }
    }
    return fm;
}

struct TrainingView {
    const FeatureMatrix* data;
    std::vector<std::size_t> indices;  // bootstrap sample
};

int majority_label(const std::array<std::uint32_t, 2>& votes) {
    return votes[1] > votes[0] ? 1 : 0;
}

// Recursive Gini tree growth over the bootstrap rows in [begin, end).
int grow_node(Tree& tree, const FeatureMatrix& data, std::vector<std::size_t>& rows,
              std::size_t begin, std::size_t end, std::size_t mtry, Rng& rng) {
    std::array<std::uint32_t, 2> votes{0, 0};
    for (std::size_t i = begin; i < end; ++i) ++votes[data.labels[rows[i]]];

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].votes = votes;
    if (votes[0] == 0 || votes[1] == 0) return node_id;  // pure leaf

    const std::size_t n_features = data.rows[0].size();
    std::vector<std::size_t> feats(n_features);
    for (std::size_t i = 0; i < n_features; ++i) feats[i] = i;
    for (std::size_t i = 0; i < mtry && i < n_features; ++i)
        std::swap(feats[i], feats[i + rng.below(n_features - i)]);

    const auto total = static_cast<double>(end - begin);
    double best_score = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> vals;
    for (std::size_t fi = 0; fi < mtry && fi < n_features; ++fi) {
        const std::size_t f = feats[fi];
        vals.clear();
        for (std::size_t i = begin; i < end; ++i)
            vals.emplace_back(data.rows[rows[i]][f], data.labels[rows[i]]);
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) continue;

        double left0 = 0.0, left1 = 0.0;
        const double tot0 = votes[0], tot1 = votes[1];
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            if (vals[i].second == 0)
                left0 += 1.0;
            else
                left1 += 1.0;
            if (vals[i].first == vals[i + 1].first) continue;
            const double nl = left0 + left1, nr = total - nl;
            const double gl = 1.0 - (left0 / nl) * (left0 / nl) - (left1 / nl) * (left1 / nl);
            const double r0 = tot0 - left0, r1 = tot1 - left1;
            const double gr = 1.0 - (r0 / nr) * (r0 / nr) - (r1 / nr) * (r1 / nr);
            const double score = (nl * gl + nr * gr) / total;
            if (score < best_score) {
                best_score = score;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
            }
        }
    }

    if (best_feature < 0) return node_id;  // no usable split among the candidates

    const auto mid = std::stable_partition(rows.begin() + begin, rows.begin() + end,
                                           [&](std::size_t r) {
                                               return data.rows[r][best_feature] <= best_threshold;
                                           });
    const auto split = static_cast<std::size_t>(mid - rows.begin());
    if (split == begin || split == end) return node_id;  // degenerate split, keep as leaf

    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    const int left = grow_node(tree, data, rows, begin, split, mtry, rng);
    tree.nodes[node_id].left = left;
    const int right = grow_node(tree, data, rows, split, end, mtry, rng);
    tree.nodes[node_id].right = right;
    return node_id;
}

Tree train_tree(const FeatureMatrix& data, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = data.rows.size();
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = rng.below(n);

    const auto mtry = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(data.rows[0].size()))));
    Tree tree;
    grow_node(tree, data, rows, 0, n, mtry, rng);
    return tree;
}

ForestModel train_forest_impl(const FeatureMatrix& x, std::size_t n_trees, std::uint64_t seed,
                              bool parallel) {
    if (!x.has_labels()) throw std::invalid_argument("train_forest: labels required");
    if (x.rows.size() < 10) throw std::invalid_argument("train_forest: need at least 10 rows");
    bool has0 = false, has1 = false;
    for (int l : x.labels) (l ? has1 : has0) = true;
    if (!has0 || !has1) throw std::invalid_argument("train_forest: need both classes");

    ForestModel model;
    model.n_trees = n_trees;
    model.seed = seed;
    model.schema_hash = x.schema_hash;
    model.kind = x.kind;
    model.trees.resize(n_trees);

    const auto trees = static_cast<std::ptrdiff_t>(n_trees);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t t = 0; t < trees; ++t)
        model.trees[t] = train_tree(x, derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
    return model;
}

int tree_vote(const Tree& tree, const std::vector<double>& row) {
    int node = 0;
    while (tree.nodes[node].feature >= 0)
        node = row[tree.nodes[node].feature] <= tree.nodes[node].threshold ? tree.nodes[node].left
                                                                           : tree.nodes[node].right;
    return majority_label(tree.nodes[node].votes);
}

std::vector<Prediction> predict_impl(const ForestModel& model, const FeatureMatrix& x, bool parallel) {
    if (model.schema_hash != x.schema_hash)
        throw std::invalid_argument("predict: feature schema does not match the model");

    std::vector<Prediction> out(x.rows.size());
    const auto n = static_cast<std::ptrdiff_t>(x.rows.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::size_t positive = 0;
        for (const auto& tree : model.trees) positive += tree_vote(tree, x.rows[i]);
        const double frac = model.trees.empty()
                                ? 0.0
                                : static_cast<double>(positive) / static_cast<double>(model.trees.size());
        out[i] = {frac >= 0.5 ? 1 : 0, frac};
    }
    return out;
}

nlohmann::json node_to_json(const Tree& tree, int id) {
    const TreeNode& n = tree.nodes[id];
    nlohmann::json j;
    if (n.feature < 0) {
        j["votes"] = {n.votes[0], n.votes[1]};
    } else {
        j["f"] = n.feature;
        j["t"] = n.threshold;
        j["l"] = node_to_json(tree, n.left);
        j["r"] = node_to_json(tree, n.right);
    }
    return j;
}

int node_from_json(Tree& tree, const nlohmann::json& j) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    if (j.contains("votes")) {
        tree.nodes[id].votes = {j["votes"][0].get<std::uint32_t>(), j["votes"][1].get<std::uint32_t>()};
    } else {
        const int feature = j.at("f").get<int>();
        const double threshold = j.at("t").get<double>();
        const int left = node_from_json(tree, j.at("l"));
        const int right = node_from_json(tree, j.at("r"));
        tree.nodes[id].feature = feature;
        tree.nodes[id].threshold = threshold;
        tree.nodes[id].left = left;
        tree.nodes[id].right = right;
    }
    return id;
}

} // namespace

MicroeventParams microevent_params(EventKind kind) {
    switch (kind) {
        case EventKind::Spindle:
            return {10.0, 12.0, 9.0, 16.0, 64, 16};
        case EventKind::KComplex:
            return {0.5, 1.0, 1.5, 4.5, 256, 64};
        case EventKind::Movement:
            break;
    }
    throw std::invalid_argument("microevent_params: only spindle and kcomplex are feature kinds");
}

std::uint64_t feature_schema_hash(EventKind kind, double window_len_s) {
    static const char* stats[kStatsPerChannel] = {"max", "mean", "median", "std",  "sum",
                                                  "energy", "mcross", "iqr", "p10", "p90"};
    const MicroeventParams p = microevent_params(kind);
    char spec[160];
    std::snprintf(spec, sizeof(spec), "%s|a=%.3f-%.3f|b=%.3f-%.3f|win=%.3f", to_string(kind),
                  p.band_a_lo, p.band_a_hi, p.band_b_lo, p.band_b_hi, window_len_s);

    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const char* s) {
        for (; *s; ++s) {
            h ^= static_cast<unsigned char>(*s);
            h *= 0x100000001b3ULL;
        }
        h ^= '|';
        h *= 0x100000001b3ULL;
    };
    mix(spec);
    static const char* channels[6] = {"raw", "band_a", "band_b", "ca2", "cd2", "imf1"};
    for (const char* c : channels)
        for (const char* s : stats) {
            mix(c);
            mix(s);
        }
    return h;
}

std::array<double, kStatsPerChannel> window_stats10(const std::vector<double>& w) {
    if (w.empty()) throw std::invalid_argument("window_stats10: empty window");
    const auto n = static_cast<double>(w.size());

    double sum = 0.0, max = w[0];
    for (double v : w) {
        sum += v;
        max = std::max(max, v);
    }
    const double mean = sum / n;

    double var = 0.0, energy = 0.0;
    for (double v : w) {
        var += (v - mean) * (v - mean);
        energy += v * v;
    }
    var /= n;

    std::size_t crossings = 0;
    int last_sign = 0;
    for (double v : w) {
        const double d = v - mean;
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s != 0) {
            if (last_sign != 0 && s != last_sign) ++crossings;
            last_sign = s;
        }
    }

    std::vector<double> sorted(w);
    std::sort(sorted.begin(), sorted.end());
    const double median = percentile_linear(sorted, 50.0);
    const double iqr = percentile_linear(sorted, 75.0) - percentile_linear(sorted, 25.0);
    const double p10 = percentile_linear(sorted, 10.0);
    const double p90 = percentile_linear(sorted, 90.0);

    return {max, mean, median, std::sqrt(var), sum, energy, static_cast<double>(crossings), iqr, p10, p90};
}

AugmentedChannels build_feature_channels(const std::vector<double>& eeg, double fs_hz, EventKind kind) {
    return build_feature_channels_impl(eeg, fs_hz, kind, true);
}

AugmentedChannels build_feature_channels_serial(const std::vector<double>& eeg, double fs_hz,
                                                EventKind kind) {
    return build_feature_channels_impl(eeg, fs_hz, kind, false);
}

FeatureMatrix window_statistics(const AugmentedChannels& ac, double hop_s) {
    return window_statistics_impl(ac, hop_s, true);
}

FeatureMatrix window_statistics_serial(const AugmentedChannels& ac, double hop_s) {
    return window_statistics_impl(ac, hop_s, false);
}

FeatureMatrix smote_balance(const FeatureMatrix& x, std::size_t k, std::uint64_t seed,
                            std::string* warning) {
    if (!x.has_labels()) throw std::invalid_argument("smote_balance: labels required");

    std::vector<std::size_t> class_rows[2];
    for (std::size_t i = 0; i < x.rows.size(); ++i) class_rows[x.labels[i]].push_back(i);
    if (class_rows[0].empty() || class_rows[1].empty())
        throw std::invalid_argument("smote_balance: both classes must be present");

    const int minority = class_rows[1].size() < class_rows[0].size() ? 1 : 0;
    const auto& mino = class_rows[minority];
    const auto& majo = class_rows[1 - minority];
    if (mino.size() == majo.size()) return x;

    std::size_t k_eff = k;
    if (mino.size() < k + 1) {
        k_eff = mino.size() - 1;
        if (warning)
            *warning = "smote: minority count " + std::to_string(mino.size()) +
                       " < k+1, reduced k to " + std::to_string(k_eff);
    }
    if (k_eff == 0)
        throw std::invalid_argument("smote_balance: minority class needs at least 2 rows");

    // k nearest minority neighbours of each minority row (Euclidean)
    std::vector<std::vector<std::size_t>> neighbours(mino.size());
    for (std::size_t i = 0; i < mino.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(mino.size() - 1);
        for (std::size_t j = 0; j < mino.size(); ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            const auto& a = x.rows[mino[i]];
            const auto& b = x.rows[mino[j]];
            for (std::size_t c = 0; c < a.size(); ++c) d2 += (a[c] - b[c]) * (a[c] - b[c]);
            dist.emplace_back(d2, j);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t j = 0; j < k_eff; ++j) neighbours[i].push_back(dist[j].second);
    }

    FeatureMatrix out = x;
    Rng rng(derive_seed(seed, "smote"));
    const std::size_t n_new = majo.size() - mino.size();
    for (std::size_t j = 0; j < n_new; ++j) {
        const std::size_t pi = j % mino.size();
        const auto& p = x.rows[mino[pi]];
        const auto& q = x.rows[mino[neighbours[pi][rng.below(k_eff)]]];
        const double u = rng.uniform();
        std::vector<double> row(p.size());
        for (std::size_t c = 0; c < p.size(); ++c) row[c] = p[c] + u * (q[c] - p[c]);
        out.rows.push_back(std::move(row));
        out.labels.push_back(minority);
    }
    return out;
}

ForestModel train_forest(const FeatureMatrix& x, std::size_t n_trees, std::uint64_t seed) {
    return train_forest_impl(x, n_trees, seed, true);
}

ForestModel train_forest_serial(const FeatureMatrix& x, std::size_t n_trees, std::uint64_t seed) {
    return train_forest_impl(x, n_trees, seed, false);
}

std::vector<Prediction> predict(const ForestModel& model, const FeatureMatrix& x) {
    return predict_impl(model, x, true);
}

std::vector<Prediction> predict_serial(const ForestModel& model, const FeatureMatrix& x) {
    return predict_impl(model, x, false);
}

void save_model(const ForestModel& model, const std::string& path) {
    nlohmann::json j;
    j["schema_hash"] = model.schema_hash;
    j["n_trees"] = model.n_trees;
    j["seed"] = model.seed;
    j["kind"] = to_string(model.kind);
    auto& trees = j["trees"] = nlohmann::json::array();
    for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump() << '\n';
}

ForestModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;

    ForestModel model;
    model.schema_hash = j.at("schema_hash").get<std::uint64_t>();
    model.n_trees = j.at("n_trees").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.kind = event_kind_from_name(j.at("kind").get<std::string>());
    for (const auto& tj : j.at("trees")) {
        Tree t;
        node_from_json(t, tj);
        model.trees.push_back(std::move(t));
    }
    return model;
}

std::vector<int> window_truth_labels(const std::vector<EventInterval>& events, EventKind kind,
                                     std::size_t n_windows, double fs_hz, std::size_t win_len,
                                     std::size_t hop) {
    const double win_s = static_cast<double>(win_len) / fs_hz;
    std::vector<int> labels(n_windows, 0);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const double start = static_cast<double>(w * hop) / fs_hz;
        const double end = start + win_s;
        double overlap = 0.0;
        for (const auto& ev : events) {
            if (ev.kind != kind) continue;
            overlap += std::max(0.0, std::min(end, ev.end_s) - std::max(start, ev.start_s));
        }
        if (overlap >= 0.5 * win_s) labels[w] = 1;  // exact half counts as positive
    }
    return labels;
}

std::vector<DetectedEvent> merge_positive_windows(const std::vector<int>& labels, double fs_hz,
                                                  std::size_t win_len, std::size_t hop,
                                                  double merge_gap_s) {
    const double win_s = static_cast<double>(win_len) / fs_hz;
    std::vector<DetectedEvent> merged;
    double cur_start = 0.0, cur_end = -1.0;

    auto flush = [&]() {
        if (cur_end < 0.0) return;
        const double dur = cur_end - cur_start;
        if (dur >= kMinEventS) {
            DetectedEvent ev;
            ev.interval = {EventKind::Spindle, cur_start, cur_end};
            ev.overlong = dur > kMaxEventS;
            merged.push_back(ev);
        }
        cur_end = -1.0;
    };

    for (std::size_t w = 0; w < labels.size(); ++w) {
        if (!labels[w]) continue;
        const double start = static_cast<double>(w * hop) / fs_hz;
        const double end = start + win_s;
        if (cur_end >= 0.0 && start - cur_end <= merge_gap_s + 1e-12) {
            cur_end = std::max(cur_end, end);
        } else {
            flush();
            cur_start = start;
            cur_end = end;
        }
    }
    flush();
    return merged;
}

std::vector<int> detect_event_windows(const std::vector<double>& eeg, double fs_hz,
                                      const ForestModel& model, EventKind kind) {
    if (model.kind != kind)
        throw std::invalid_argument("detect_events: model was trained for a different event kind");
    if (eeg.empty()) return {};

    const FilterSpec bp = design_butterworth_bandpass(5, 0.5, 35.0, fs_hz);
    const std::size_t pad = 3 * (2 * bp.sections.size() + 1);
    if (eeg.size() <= pad) return {};

    const auto clean = interpolate_nans(eeg);
    if (std::isnan(clean[0])) return {};  // no finite samples at all

    const auto filtered = filtfilt(bp, clean);
    const auto ac = build_feature_channels(filtered, fs_hz, kind);
    const auto fm = window_statistics(ac);
    const auto preds = predict(model, fm);

    std::vector<int> labels(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) labels[i] = preds[i].label;
    return labels;
}

std::vector<DetectedEvent> detect_events(const std::vector<double>& eeg, double fs_hz,
                                         const ForestModel& model, EventKind kind) {
    const auto labels = detect_event_windows(eeg, fs_hz, model, kind);
    if (labels.empty()) return {};

    const auto win = static_cast<std::size_t>(std::llround(1.0 * fs_hz));
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.25 * fs_hz)));
    auto events = merge_positive_windows(labels, fs_hz, win, hop, kMergeGapS);
    for (auto& ev : events) ev.interval.kind = kind;
    return events;
}

DetectorScores evaluate_detector(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("evaluate_detector: length mismatch");

    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] && predicted[i]) ++tp;
        else if (truth[i] && !predicted[i]) ++fn;
        else if (!truth[i] && predicted[i]) ++fp;
        else ++tn;
    }
    DetectorScores s;
    s.sensitivity = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    s.specificity = (tn + fp) > 0 ? tn / (tn + fp) : 0.0;
    s.accuracy = truth.empty() ? 0.0 : (tp + tn) / static_cast<double>(truth.size());
    return s;
}

} // namespace somno
