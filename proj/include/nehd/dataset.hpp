#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nehd/wav.hpp"

namespace nehd {

/// One fixed-duration window cut from a source recording.
struct Segment {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string source_id;
    double offset_seconds = 0.0;
    std::string label;
};

/// Non-overlapping consecutive windows; the trailing remainder shorter than
/// one window is dropped. A waveform shorter than one window yields an empty
/// list.
std::vector<Segment> segment(const Waveform& w, double window_seconds,
                             const std::string& source_id = "", const std::string& label = "");

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
    std::string source_id;
    std::string path;  // relative to the manifest's directory unless absolute
    std::string label;
    Split split = Split::kTrain;
};

struct DatasetManifest {
    static constexpr int kSchemaVersion = 1;
    std::vector<ManifestEntry> entries;
    std::vector<std::string> class_names;  // sorted unique labels
    std::uint64_t seed = 0;

    std::size_t label_index(const std::string& label) const;
    std::vector<ManifestEntry> split_entries(Split s) const;
};

struct SourceRecord {
    std::string source_id;
    std::string path;
    std::string label;
};

/// Stratified source-level split with the largest-remainder rounding rule
/// per class (ties broken toward the earlier split). Deterministic for a
/// fixed seed; the input order of sources does not matter.
DatasetManifest split_dataset(const std::vector<SourceRecord>& sources,
                              const std::array<double, 3>& ratios, std::uint64_t seed);

/// Line-delimited JSON: a header record with schema version, class names and
/// seed, then one record per source.
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace nehd
