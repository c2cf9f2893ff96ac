#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nehd/dataset.hpp"
#include "nehd/wav.hpp"

namespace nehd {

/// Four fixed sonar-like class recipes:
///   0 tonal      fundamental (jittered per source) + 3 harmonics
///   1 chirp      slow up-chirps repeating every 0.5 s
///   2 broadband  noise with a per-source spectral slope
///   3 am tonal   carrier with propeller-like 4-8 Hz amplitude modulation
struct SynthSpec {
    int per_class_sources = 20;
    double duration_seconds = 9.0;
    int sample_rate = 16000;
    std::uint64_t seed = 0;
    double snr_db = 10.0;  // +infinity disables the noise floor
};

inline constexpr int kSynthClassCount = 4;
inline constexpr std::array<const char*, 4> kSynthClassNames = {"c0_tonal", "c1_chirp",
                                                                "c2_broadband", "c3_am"};

/// Throws std::invalid_argument on per_class_sources < 3 (stratified split
/// needs 3 sources per class), non-positive duration or rate, or a NaN /
/// -infinity snr_db.
void validate(const SynthSpec& spec);

/// Deterministic in (spec.seed, class_id, source_index); independent of
/// generation order across sources.
Waveform generate_source(int class_id, const SynthSpec& spec, int source_index);

/// Writes one WAV per source into out_dir plus manifest.jsonl with a
/// stratified source-level split.
DatasetManifest build_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                             const std::array<double, 3>& ratios = {0.7, 0.1, 0.2});

}  // namespace nehd
