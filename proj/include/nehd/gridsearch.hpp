#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nehd/dataset.hpp"
#include "nehd/model.hpp"
#include "nehd/train.hpp"

namespace nehd {

struct GridSpec {
    std::vector<std::size_t> windows = {2048, 4096, 6144};
    std::vector<std::size_t> hops = {1024, 2048, 4096};
    std::vector<std::size_t> bins = {48, 96, 192};
    int runs_per_cell = 1;
};

enum class CellStatus { kOk, kSkipped, kFailed };

struct GridCell {
    std::size_t window = 0;
    std::size_t hop = 0;
    std::size_t bins = 0;
    CellStatus status = CellStatus::kOk;
    std::string reason;  // set for skipped and failed cells
    double mean_val_acc = 0.0;
    std::vector<double> run_accs;
};

struct GridResult {
    GridSpec spec;
    std::vector<GridCell> cells;  // bins-major, then hops, then windows

    const GridCell& cell(std::size_t window, std::size_t hop, std::size_t bins) const;
};

/// Per-cell seed stream; exposed so a standalone run can reproduce any cell.
/// Run r inside a cell trains with mix_seed(cell_seed(...), r).
std::uint64_t cell_seed(std::uint64_t base, std::size_t window, std::size_t hop,
                        std::size_t bins);

/// Trains the nehd variant per (window, hop, bins) cell; invalid combinations
/// (hop > window, too many bins for the window, pooling that cannot fit) are
/// marked skipped with a reason, and per-cell training failures are recorded
/// rather than aborting the grid.
GridResult grid_search(const GridSpec& grid, const DatasetManifest& manifest,
                       const std::filesystem::path& root, const ModelConfig& model_template,
                       const TrainConfig& train_cfg, const IngestConfig& ingest);

}  // namespace nehd
