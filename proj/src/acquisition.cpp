#include "somno/acquisition.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace somno {

namespace {

constexpr std::size_t kHeaderBytes = 4;  // magic + seq + tick_count
constexpr std::size_t kCrcBytes = 2;

std::size_t frame_bytes(std::size_t ticks) { return kHeaderBytes + 16 * ticks + kCrcBytes; }

// even seq frames carry 13 ticks, odd 12
std::size_t expected_ticks(std::uint16_t seq) { return seq % 2 == 0 ? 13 : 12; }

struct CrcTable {
    std::uint16_t entries[256];
    CrcTable() {
        for (unsigned b = 0; b < 256; ++b) {
            std::uint16_t crc = static_cast<std::uint16_t>(b << 8);
            for (int bit = 0; bit < 8; ++bit)
                crc = crc & 0x8000 ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                   : static_cast<std::uint16_t>(crc << 1);
            entries[b] = crc;
        }
    }
};

const CrcTable kCrcTable;

std::uint16_t quantize(double volts, double adc_scale) {
    if (std::isnan(volts)) throw std::invalid_argument("encode_frames: NaN sample cannot be encoded");
    const auto raw = std::llround(volts / adc_scale);
    if (raw < 0 || raw > 4095)
        throw std::out_of_range("encode_frames: sample " + std::to_string(volts) +
                                " V outside the 12-bit ADC range");
    return static_cast<std::uint16_t>(raw);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

std::uint16_t crc16_ccitt_false(const std::uint8_t* data, std::size_t len) {
    std::uint16_t crc = 0xFFFF;
    for (std::size_t i = 0; i < len; ++i)
        crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable.entries[((crc >> 8) ^ data[i]) & 0xFF]);
    return crc;
}

std::uint16_t crc16_ccitt_false(const std::vector<std::uint8_t>& data) {
    return crc16_ccitt_false(data.data(), data.size());
}

std::vector<std::uint8_t> encode_frames(const Recording& rec) {
    rec.validate();
    const std::size_t total_ticks = rec.fast_len();
    std::vector<std::uint8_t> out;
    out.reserve(total_ticks * 16 + (total_ticks / 12 + 1) * (kHeaderBytes + kCrcBytes));

    std::uint16_t seq = 0;
    std::size_t tick = 0;
    while (tick < total_ticks) {
        const std::size_t want = expected_ticks(seq);
        const std::size_t count = std::min(want, total_ticks - tick);

        const std::size_t frame_start = out.size();
        out.push_back(kFrameMagic);
        put_u16(out, seq);
        out.push_back(static_cast<std::uint8_t>(count));
        for (std::size_t t = 0; t < count; ++t, ++tick) {
            for (int c = 0; c < kNumFastChannels; ++c)
                put_u16(out, quantize(rec.fast[c][tick], rec.adc_scale));
            const std::size_t patch = tick % 3;
            const std::size_t idx = tick / 3;
            put_u16(out, quantize(rec.slow[patch][idx], rec.adc_scale));
        }
        const std::uint16_t crc = crc16_ccitt_false(out.data() + frame_start, out.size() - frame_start);
        put_u16(out, crc);
        ++seq;  // u16 wrap is intentional
    }
    return out;
}

void StreamDecoder::append_tick(const double* values) {
    for (int c = 0; c < kNumFastChannels; ++c) fast_[c].push_back(values[c]);
    if (!std::isnan(values[kNumFastChannels]))
        resp_slots_.emplace_back(total_ticks_, values[kNumFastChannels]);
    ++total_ticks_;
}

void StreamDecoder::append_lost_ticks(std::size_t count) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t t = 0; t < count; ++t) {
        for (int c = 0; c < kNumFastChannels; ++c) fast_[c].push_back(nan);
        ++total_ticks_;
    }
    report_.samples_lost += count;
}

void StreamDecoder::accept_frame(std::uint16_t seq, const std::uint8_t* payload, std::size_t tick_count) {
    constexpr double adc_scale = 3.3 / 4096.0;

    if (have_seq_) {
        const std::uint16_t gap = static_cast<std::uint16_t>(seq - next_seq_);
        if (gap > 0x7FFF) {  // stale or duplicated frame
            ++report_.frames_corrupt;
            return;
        }
        for (std::uint16_t g = 0; g < gap; ++g) {
            append_lost_ticks(expected_ticks(static_cast<std::uint16_t>(next_seq_ + g)));
            ++report_.frames_lost;
        }
    }
    have_seq_ = true;
    next_seq_ = static_cast<std::uint16_t>(seq + 1);

    for (std::size_t t = 0; t < tick_count; ++t) {
        double values[kChannelsPerTick];
        for (std::size_t c = 0; c < kChannelsPerTick; ++c)
            values[c] = static_cast<double>(get_u16(payload + 16 * t + 2 * c)) * adc_scale;
        append_tick(values);
    }
    ++report_.frames_ok;
}

void StreamDecoder::process(bool flushing) {
    while (true) {
        while (scan_pos_ < buffer_.size() && buffer_[scan_pos_] != kFrameMagic) ++scan_pos_;
        if (scan_pos_ >= buffer_.size()) break;

        const std::size_t avail = buffer_.size() - scan_pos_;
        if (avail < kHeaderBytes) {
            if (!flushing) break;  // the header may still arrive
            ++scan_pos_;
            continue;
        }
        const std::uint8_t* frame = buffer_.data() + scan_pos_;
        const std::size_t ticks = frame[3];
        if (ticks == 0 || ticks > kMaxTicksPerFrame) {
            ++scan_pos_;  // not a plausible frame header
            continue;
        }
        const std::size_t need = frame_bytes(ticks);
        if (avail < need) {
            if (!flushing) break;
            ++scan_pos_;
            continue;
        }

        const std::uint16_t crc = crc16_ccitt_false(frame, need - kCrcBytes);
        if (crc != get_u16(frame + need - kCrcBytes)) {
            ++report_.frames_corrupt;
            ++scan_pos_;  // resynchronize at the next magic
            continue;
        }

        accept_frame(get_u16(frame + 1), frame + kHeaderBytes, ticks);
        scan_pos_ += need;
    }

    if (scan_pos_ > 0) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(scan_pos_));
        scan_pos_ = 0;
    }
}

void StreamDecoder::feed(const std::uint8_t* data, std::size_t len) {
    buffer_.insert(buffer_.end(), data, data + len);
    process(false);
}

std::pair<Recording, LossReport> StreamDecoder::finish() {
    process(true);

    Recording rec;
    rec.fast_rate_hz = 125.0;
    rec.slow_rate = {125, 3};
    for (int c = 0; c < kNumFastChannels; ++c) rec.fast[c] = std::move(fast_[c]);
    const std::size_t slow_len = (total_ticks_ + 2) / 3;
    for (int c = 0; c < kNumSlowChannels; ++c)
        rec.slow[c].assign(slow_len, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [tick, volts] : resp_slots_)
        rec.slow[tick % 3][tick / 3] = volts;

    rec.validate();
    return {std::move(rec), report_};
}

std::pair<Recording, LossReport> decode_stream(const std::vector<std::uint8_t>& bytes) {
    StreamDecoder dec;
    dec.feed(bytes);
    return dec.finish();
}

} // namespace somno
