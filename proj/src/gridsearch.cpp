#include "nehd/gridsearch.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nehd/metrics.hpp"
#include "nehd/rng.hpp"
#include "nehd/stft.hpp"

namespace nehd {

std::uint64_t cell_seed(std::uint64_t base, std::size_t window, std::size_t hop,
                        std::size_t bins) {
    std::uint64_t s = mix_seed(base, "grid");
    s = mix_seed(s, static_cast<std::uint64_t>(window));
    s = mix_seed(s, static_cast<std::uint64_t>(hop));
    return mix_seed(s, static_cast<std::uint64_t>(bins));
}

const GridCell& GridResult::cell(std::size_t window, std::size_t hop, std::size_t bins) const {
    for (const auto& c : cells) {
        if (c.window == window && c.hop == hop && c.bins == bins) return c;
    }
    throw std::invalid_argument("grid result: no such cell");
}

namespace {

// Validity mirrors the stft config invariants plus the model's pooling needs;
// returns an empty string when the cell can run.
std::string skip_reason(std::size_t window, std::size_t hop, std::size_t bins,
                        const ModelConfig& tmpl, const IngestConfig& ingest) {
    if (hop > window) return "hop exceeds window";
    if (bins > window / 2 + 1) return "more bins than one-sided spectrum";
    const auto segment_samples = static_cast<std::size_t>(
        std::llround(ingest.segment_seconds * ingest.target_rate));
    StftConfig cfg;
    cfg.window_length = window;
    cfg.hop_length = hop;
    cfg.freq_bins = bins;
    const std::size_t frames = stft_num_frames(segment_samples, cfg);
    if (frames < tmpl.pool_cols) return "too few frames for the pooling window";
    if (bins < tmpl.pool_rows) return "too few bins for the pooling window";
    return "";
}

}  // namespace

GridResult grid_search(const GridSpec& grid, const DatasetManifest& manifest,
                       const std::filesystem::path& root, const ModelConfig& model_template,
                       const TrainConfig& train_cfg, const IngestConfig& ingest) {
    if (grid.windows.empty() || grid.hops.empty() || grid.bins.empty()) {
        throw std::invalid_argument("grid search: empty candidate set");
    }
    if (grid.runs_per_cell < 1) {
        throw std::invalid_argument("grid search: runs_per_cell must be >= 1");
    }

    GridResult result;
    result.spec = grid;
    const auto segment_samples = static_cast<std::size_t>(
        std::llround(ingest.segment_seconds * ingest.target_rate));

    for (std::size_t bins : grid.bins) {
        for (std::size_t hop : grid.hops) {
            for (std::size_t window : grid.windows) {
                GridCell cell;
                cell.window = window;
                cell.hop = hop;
                cell.bins = bins;

                const std::string reason =
                    skip_reason(window, hop, bins, model_template, ingest);
                if (!reason.empty()) {
                    cell.status = CellStatus::kSkipped;
                    cell.reason = reason;
                    result.cells.push_back(std::move(cell));
                    continue;
                }

                StftConfig stft_cfg;
                stft_cfg.window_length = window;
                stft_cfg.hop_length = hop;
                stft_cfg.freq_bins = bins;

                ModelConfig mc = model_template;
                mc.kind = VariantKind::kNehd;
                mc.freq_bins = bins;
                mc.frames = stft_num_frames(segment_samples, stft_cfg);

                try {
                    const LoadedDataset data = load_dataset(manifest, root, stft_cfg, ingest);
                    const std::uint64_t cs = cell_seed(train_cfg.seed, window, hop, bins);
                    for (int r = 0; r < grid.runs_per_cell; ++r) {
                        const std::uint64_t run_seed = mix_seed(cs, static_cast<std::uint64_t>(r));
                        TrainConfig tc = train_cfg;
                        tc.seed = run_seed;
                        tc.shuffle_seed.reset();
                        const Model init = build_model(mc, run_seed);
                        const TrainResult tr = train(init, data, tc);
                        cell.run_accs.push_back(tr.history.best_val_acc);
                    }
                    cell.mean_val_acc = aggregate(cell.run_accs).mean;
                } catch (const std::exception& e) {
                    cell.status = CellStatus::kFailed;
                    cell.reason = e.what();
                    cell.run_accs.clear();
                    cell.mean_val_acc = 0.0;
                }
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

}  // namespace nehd
