#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nehd {

/// Mono audio in [-1, 1] at a known sample rate.
struct Waveform {
    std::vector<double> samples;
    int sample_rate = 0;

    double duration_seconds() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

/// Parse a RIFF/WAVE buffer. Accepts PCM 16-bit and IEEE float 32-bit,
/// 1 or 2 channels. Stereo is averaged to mono; 16-bit samples are scaled
/// by 1/32768. Throws std::runtime_error naming the offending chunk on
/// malformed input, and an unsupported-format error for other encodings.
Waveform decode_wav(const std::vector<std::uint8_t>& bytes);

Waveform decode_wav_file(const std::filesystem::path& path);

/// Serialize as 16-bit PCM mono. Samples are clamped to [-1, 1] and
/// quantized with round-to-nearest.
std::vector<std::uint8_t> encode_wav16(const Waveform& w);

void encode_wav16_file(const std::filesystem::path& path, const Waveform& w);

}  // namespace nehd
