#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nehd/model.hpp"
#include "nehd/stft.hpp"
#include "nehd/train.hpp"

namespace nehd {

/// Everything needed to rebuild and re-drive the model: structural config,
/// the full preprocessing recipe, and dataset identity.
struct CheckpointMeta {
    std::string tool_version;
    ModelConfig model;
    StftConfig stft;
    IngestConfig ingest;
    std::uint64_t seed = 0;
    std::vector<std::string> class_names;
    std::string manifest_hash;  // git-blob content hash of the manifest file
};

/// Binary container: magic "NEHDCKPT" | u32 version | u32 tensor count |
/// per tensor {u32 name_len, name, u32 ndim, u32 dims[], f32 data LE}.
/// Tensors cover all learnable parameters plus norm.mean / norm.std.
/// A JSON sidecar at <path>.json records the meta block. Loading rejects
/// unknown container versions and rebuilds the model from the sidecar.
void save_checkpoint(Model& m, const NormStats& stats, const CheckpointMeta& meta,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
    Model model;
    NormStats stats;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nehd
