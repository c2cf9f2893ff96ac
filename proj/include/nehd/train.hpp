#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nehd/adam.hpp"
#include "nehd/dataset.hpp"
#include "nehd/model.hpp"
#include "nehd/stft.hpp"

namespace nehd {

struct TrainConfig {
    int epochs = 50;
    std::size_t batch_size = 128;
    int patience = 40;
    AdamConfig adam;
    std::uint64_t seed = 0;
    int num_runs = 3;  // used by multi-run drivers, not by a single train()
    /// Data-shuffle stream; defaults to a substream of seed. Overridable so
    /// shuffle order can vary with everything else held fixed.
    std::optional<std::uint64_t> shuffle_seed;
};

/// Throws std::invalid_argument on non-positive epochs/batch/learning rate,
/// negative patience, or patience > epochs.
void validate(const TrainConfig& cfg);

struct IngestConfig {
    int target_rate = 16000;
    double segment_seconds = 3.0;
};

struct LabeledPlane {
    Tensor values;  // normalized [freq_bins x frames]
    int label = 0;
    std::string segment_id;
};

struct LoadedDataset {
    std::vector<LabeledPlane> train;
    std::vector<LabeledPlane> val;
    std::vector<LabeledPlane> test;
    NormStats stats;  // fitted on the training split only
    std::vector<std::string> class_names;
};

/// Decode, resample, segment and transform every manifest source; normalizer
/// statistics come from the training split alone and are applied to all
/// three. Relative manifest paths resolve against root.
LoadedDataset load_dataset(const DatasetManifest& m, const std::filesystem::path& root,
                           const StftConfig& stft_cfg, const IngestConfig& ingest);

/// One split's planes, unnormalized (for evaluating against stored stats).
std::vector<LabeledPlane> load_split(const DatasetManifest& m, const std::filesystem::path& root,
                                     Split split, const StftConfig& stft_cfg,
                                     const IngestConfig& ingest);

void normalize_planes(std::vector<LabeledPlane>& planes, const NormStats& stats);

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_acc;
    // argmax val_acc; equal accuracies resolve to the epoch with the lower
    // validation loss, remaining ties to the earlier epoch
    std::size_t best_epoch = 0;
    double best_val_acc = 0.0;
    double wall_clock_seconds = 0.0;
};

/// CSV columns: epoch,train_loss,val_loss,val_acc. Wall clock is kept out so
/// identical runs produce identical bytes.
void save_history_csv(const TrainHistory& h, const std::filesystem::path& path);

struct TrainResult {
    Model model;  // parameters restored from the best validation epoch
    TrainHistory history;
};

/// Seeded epoch shuffles, Adam updates per mini-batch, early stop once
/// validation accuracy has not improved for `patience` epochs (at least one);
/// accuracy ties keep the snapshot with the lower validation loss but never
/// reset the patience counter. Histogram-variant outputs are range-checked
/// after every epoch. Throws on an empty split.
TrainResult train(const Model& init, const LoadedDataset& data, const TrainConfig& cfg);

}  // namespace nehd
