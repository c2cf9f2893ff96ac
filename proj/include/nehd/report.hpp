#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nehd/gridsearch.hpp"
#include "nehd/metrics.hpp"
#include "nehd/model.hpp"

namespace nehd {

/// All writers emit UTF-8 CSV with headers and fixed numeric precision, so
/// identical inputs always give byte-identical files. Empty inputs are
/// rejected rather than producing empty reports.

void write_metrics_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                       const std::filesystem::path& path);

void write_confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                         bool row_normalized, const std::filesystem::path& path);

struct VariantRuns {
    std::string variant;
    std::vector<double> accuracies;  // one per run
};

/// Mean and sample std (n-1) per variant.
void write_ablation_csv(const std::vector<VariantRuns>& runs, const std::filesystem::path& path);

void write_params_csv(const std::vector<std::pair<std::string, std::vector<ParamCount>>>& models,
                      const std::filesystem::path& path);

/// One table per bins value: grid_bins<N>.csv, hops down, windows across.
void write_grid_csvs(const GridResult& grid, const std::filesystem::path& dir);

struct SummaryInfo {
    std::string tool_version;
    std::string config_hash;    // content hash of the resolved config snapshot
    std::string manifest_hash;  // content hash of the input manifest
    std::vector<std::uint64_t> seeds;
};

void write_summary_json(const SummaryInfo& info, const std::filesystem::path& path);

}  // namespace nehd
