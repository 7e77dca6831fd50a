#include "somno/recording.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace somno {

namespace {

const char* kFastNames[kNumFastChannels] = {"eeg_l", "eeg_r", "eog_l", "eog_r",
                                            "bcg_p1", "bcg_p2", "bcg_p3"};
const char* kSlowNames[kNumSlowChannels] = {"resp_p1", "resp_p2", "resp_p3"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_sample(const std::string& s, const std::string& file, std::size_t row) {
    if (s == "NaN" || s == "nan" || s == "NAN")
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(file + ": row " + std::to_string(row) + ": bad number '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error(file + ": row " + std::to_string(row) + ": bad number '" + s + "'");
    return v;
}

void format_sample(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "NaN";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10f", v);
    out += buf;
}

// Reads a t,<channels...> CSV with an exact expected header.
std::vector<std::vector<double>> read_sample_csv(const std::string& path,
                                                 const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    if (header.size() != expected_header.size())
        throw std::runtime_error(path + ": malformed header '" + line + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != expected_header[i]) {
            if (i > 0)  // column 0 is the time axis, the rest are channel ids
                throw std::runtime_error(path + ": unknown channel id '" + header[i] + "'");
            throw std::runtime_error(path + ": malformed header '" + line + "'");
        }
    }

    std::vector<std::vector<double>> cols(expected_header.size() - 1);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != expected_header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": channel length mismatch (" + std::to_string(fields.size() - 1) +
                                     " values, expected " + std::to_string(expected_header.size() - 1) + ")");
        for (std::size_t i = 1; i < fields.size(); ++i)
            cols[i - 1].push_back(parse_sample(fields[i], path, row));
        ++row;
    }
    return cols;
}

void write_sample_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<const std::vector<double>*>& cols, double dt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) line += ',';
        line += header[i];
    }
    line += '\n';
    out << line;
    const std::size_t n = cols.empty() || cols[0]->empty() ? 0 : cols[0]->size();
    for (std::size_t r = 0; r < n; ++r) {
        line.clear();
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%.6f", static_cast<double>(r) * dt);
        line += tbuf;
        for (const auto* c : cols) {
            line += ',';
            format_sample(line, (*c)[r]);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::size_t ceil_div3(std::size_t n) { return (n + 2) / 3; }

} // namespace

const char* to_string(FastChannel c) { return kFastNames[static_cast<int>(c)]; }
const char* to_string(SlowChannel c) { return kSlowNames[static_cast<int>(c)]; }

FastChannel fast_channel_from_name(const std::string& name) {
    for (int i = 0; i < kNumFastChannels; ++i)
        if (name == kFastNames[i]) return static_cast<FastChannel>(i);
    throw std::invalid_argument("unknown fast channel '" + name + "'");
}

SlowChannel slow_channel_from_name(const std::string& name) {
    for (int i = 0; i < kNumSlowChannels; ++i)
        if (name == kSlowNames[i]) return static_cast<SlowChannel>(i);
    throw std::invalid_argument("unknown slow channel '" + name + "'");
}

void Recording::validate() const {
    for (const auto& ch : fast)
        if (ch.size() != fast_len())
            throw std::runtime_error("fast channels have unequal lengths");
    for (const auto& ch : slow)
        if (ch.size() != slow_len())
            throw std::runtime_error("slow channels have unequal lengths");
    if (slow_len() != ceil_div3(fast_len()))
        throw std::runtime_error("slow length " + std::to_string(slow_len()) +
                                 " != ceil(fast/3) = " + std::to_string(ceil_div3(fast_len())));
    if (!(fast_rate_hz > 0.0) || slow_rate.num <= 0 || slow_rate.den <= 0)
        throw std::runtime_error("sampling rates must be positive");
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Spindle: return "spindle";
        case EventKind::KComplex: return "kcomplex";
        case EventKind::Movement: return "movement";
    }
    return "?";
}

EventKind event_kind_from_name(const std::string& name) {
    if (name == "spindle") return EventKind::Spindle;
    if (name == "kcomplex") return EventKind::KComplex;
    if (name == "movement") return EventKind::Movement;
    throw std::invalid_argument("unknown event kind '" + name + "'");
}

void EventInterval::validate() const {
    if (!(end_s > start_s))
        throw std::runtime_error("event interval must have end > start");
    if (kind != EventKind::Movement) {
        const double d = duration();
        if (d < 0.5 || d > 3.0)
            throw std::runtime_error("spindle/K-complex duration out of [0.5, 3.0] s");
    }
}

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Wake: return "W";
        case Stage::Light: return "L";
        case Stage::Deep: return "D";
        case Stage::Rem: return "R";
    }
    return "?";
}

Stage stage_from_name(const std::string& name) {
    if (name == "W") return Stage::Wake;
    if (name == "L") return Stage::Light;
    if (name == "D") return Stage::Deep;
    if (name == "R") return Stage::Rem;
    throw std::invalid_argument("unknown stage '" + name + "'");
}

double adc_to_volts(unsigned raw) {
    if (raw > 4095) throw std::out_of_range("ADC count " + std::to_string(raw) + " > 4095");
    return static_cast<double>(raw) * 3.3 / 4096.0;
}

Recording load_recording(const std::string& dir) {
    namespace fs = std::filesystem;
    Recording rec;

    const std::string meta_path = (fs::path(dir) / "meta.json").string();
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw std::runtime_error("missing meta.json in " + dir);
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const std::exception& e) {
        throw std::runtime_error(meta_path + ": " + e.what());
    }
    for (const char* key : {"fast_rate_hz", "slow_rate_num", "slow_rate_den", "start_time", "adc_scale"})
        if (!meta.contains(key)) throw std::runtime_error(meta_path + ": missing key '" + std::string(key) + "'");
    rec.fast_rate_hz = meta["fast_rate_hz"].get<double>();
    rec.slow_rate.num = meta["slow_rate_num"].get<std::int64_t>();
    rec.slow_rate.den = meta["slow_rate_den"].get<std::int64_t>();
    rec.start_time = meta["start_time"].get<std::string>();
    rec.adc_scale = meta["adc_scale"].get<double>();

    std::vector<std::string> fast_header = {"t"};
    for (const char* n : kFastNames) fast_header.push_back(n);
    auto fast_cols = read_sample_csv((fs::path(dir) / "fast.csv").string(), fast_header);
    for (int i = 0; i < kNumFastChannels; ++i) rec.fast[i] = std::move(fast_cols[i]);

    std::vector<std::string> slow_header = {"t"};
    for (const char* n : kSlowNames) slow_header.push_back(n);
    auto slow_cols = read_sample_csv((fs::path(dir) / "slow.csv").string(), slow_header);
    for (int i = 0; i < kNumSlowChannels; ++i) rec.slow[i] = std::move(slow_cols[i]);

    rec.validate();
    return rec;
}

void save_recording(const Recording& rec, const std::string& dir) {
    namespace fs = std::filesystem;
    rec.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir);

    std::vector<std::string> fast_header = {"t"};
    std::vector<const std::vector<double>*> fast_cols;
    for (int i = 0; i < kNumFastChannels; ++i) {
        fast_header.push_back(kFastNames[i]);
        fast_cols.push_back(&rec.fast[i]);
    }
    write_sample_csv((fs::path(dir) / "fast.csv").string(), fast_header, fast_cols, 1.0 / rec.fast_rate_hz);

    std::vector<std::string> slow_header = {"t"};
    std::vector<const std::vector<double>*> slow_cols;
    for (int i = 0; i < kNumSlowChannels; ++i) {
        slow_header.push_back(kSlowNames[i]);
        slow_cols.push_back(&rec.slow[i]);
    }
    write_sample_csv((fs::path(dir) / "slow.csv").string(), slow_header, slow_cols,
                     static_cast<double>(rec.slow_rate.den) / static_cast<double>(rec.slow_rate.num));

    nlohmann::json meta;
    meta["fast_rate_hz"] = rec.fast_rate_hz;
    meta["slow_rate_num"] = rec.slow_rate.num;
    meta["slow_rate_den"] = rec.slow_rate.den;
    meta["start_time"] = rec.start_time;
    meta["adc_scale"] = rec.adc_scale;
    std::ofstream meta_out(fs::path(dir) / "meta.json");
    if (!meta_out) throw std::runtime_error("cannot write meta.json in " + dir);
    meta_out << meta.dump(2) << '\n';
}

namespace {
std::vector<std::vector<double>> slice_impl(const std::vector<double>& x, double rate_hz, double epoch_len_s) {
    if (!(epoch_len_s > 0.0)) throw std::invalid_argument("epoch length must be positive");
    const auto win = static_cast<std::size_t>(std::llround(epoch_len_s * rate_hz));
    std::vector<std::vector<double>> out;
    if (win == 0) return out;
    for (std::size_t start = 0; start + win <= x.size(); start += win)
        out.emplace_back(x.begin() + start, x.begin() + start + win);
    return out;
}
} // namespace

std::vector<std::vector<double>> slice_epochs(const Recording& rec, FastChannel c, double epoch_len_s) {
    return slice_impl(rec.fast_channel(c), rec.fast_rate_hz, epoch_len_s);
}

std::vector<std::vector<double>> slice_epochs(const Recording& rec, SlowChannel c, double epoch_len_s) {
    return slice_impl(rec.slow_channel(c), rec.slow_rate.hz(), epoch_len_s);
}

std::vector<EventInterval> load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "kind,start_s,end_s")
        throw std::runtime_error(path + ": malformed header '" + line + "'");
    std::vector<EventInterval> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 3 fields");
        EventInterval ev;
        ev.kind = event_kind_from_name(fields[0]);
        ev.start_s = parse_sample(fields[1], path, row);
        ev.end_s = parse_sample(fields[2], path, row);
        ev.validate();
        out.push_back(ev);
        ++row;
    }
    return out;
}

void save_events(const std::vector<EventInterval>& events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "kind,start_s,end_s\n";
    char buf[96];
    for (const auto& ev : events) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", to_string(ev.kind), ev.start_s, ev.end_s);
        out << buf;
    }
}

Hypnogram load_stages(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "epoch,stage")
        throw std::runtime_error(path + ": malformed header '" + line + "'");
    Hypnogram h;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 2 fields");
        const auto epoch = static_cast<std::size_t>(std::stoll(fields[0]));
        if (epoch != h.stages.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": epochs must be consecutive from 0");
        h.stages.push_back(stage_from_name(fields[1]));
        ++row;
    }
    return h;
}

void save_stages(const Hypnogram& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,stage\n";
    for (std::size_t i = 0; i < h.stages.size(); ++i)
        out << i << ',' << to_string(h.stages[i]) << '\n';
}

} // namespace somno
