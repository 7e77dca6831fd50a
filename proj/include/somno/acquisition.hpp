#pragma once

#include <cstdint>
#include <vector>

#include "somno/recording.hpp"

namespace somno {

/// Wire layout, little-endian:
///   magic 0xA5 | seq u16 | tick_count u8 (1..25) | ticks x 8 x u16 raw counts | crc16
/// Channel order per tick: EEG_L, EEG_R, EOG_L, EOG_R, BCG_P1, BCG_P2, BCG_P3, RESP_MUX.
/// The mux slot of absolute tick i carries respiration patch (i mod 3).
/// Frames alternate 13/12 ticks (12.5 ticks per 100 ms transmission on average).
inline constexpr std::uint8_t kFrameMagic = 0xA5;
inline constexpr std::size_t kMaxTicksPerFrame = 25;
inline constexpr std::size_t kChannelsPerTick = 8;

/// CRC-16/CCITT-FALSE: polynomial 0x1021, init 0xFFFF, no reflection, no xor-out.
/// Check value: crc16_ccitt_false("123456789") == 0x29B1.
std::uint16_t crc16_ccitt_false(const std::uint8_t* data, std::size_t len);
std::uint16_t crc16_ccitt_false(const std::vector<std::uint8_t>& data);

struct LossReport {
    std::uint64_t frames_ok = 0;
    std::uint64_t frames_corrupt = 0;  // CRC failures and out-of-order sequence numbers
    std::uint64_t frames_lost = 0;     // missing sequence slots
    std::uint64_t samples_lost = 0;    // ticks filled with NaN for the missing slots
};

/// Serialize a Recording into the framed byte stream. Throws when a sample is
/// NaN or falls outside the 12-bit ADC range after quantization.
std::vector<std::uint8_t> encode_frames(const Recording& rec);

/// Resumable decoder: feed arbitrary byte chunks, then finish() to obtain the
/// reconstructed Recording (NaN in lost slots) and the loss accounting.
/// Never throws on malformed input; garbage simply decodes to nothing.
class StreamDecoder {
public:
    void feed(const std::uint8_t* data, std::size_t len);
    void feed(const std::vector<std::uint8_t>& data) { feed(data.data(), data.size()); }
    std::pair<Recording, LossReport> finish();

private:
    void process(bool flushing);
    void accept_frame(std::uint16_t seq, const std::uint8_t* payload, std::size_t tick_count);
    void append_tick(const double* values);  // 8 volts, NaN allowed
    void append_lost_ticks(std::size_t count);

    std::vector<std::uint8_t> buffer_;
    std::size_t scan_pos_ = 0;
    bool have_seq_ = false;
    std::uint16_t next_seq_ = 0;
    std::uint64_t total_ticks_ = 0;
    std::array<std::vector<double>, kNumFastChannels> fast_;
    std::vector<std::pair<std::uint64_t, double>> resp_slots_;  // absolute tick -> volts
    LossReport report_;
};

/// One-shot decode of a complete captured stream (.pmk contents).
std::pair<Recording, LossReport> decode_stream(const std::vector<std::uint8_t>& bytes);

} // namespace somno
