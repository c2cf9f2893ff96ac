#include "nehd/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nehd {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    if (!out) throw std::runtime_error("report: write failed for " + path.string());
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

void check_classes(const ConfusionMatrix& cm, const std::vector<std::string>& class_names) {
    if (cm.classes == 0) throw std::invalid_argument("report: empty confusion matrix");
    if (class_names.size() != cm.classes) {
        throw std::invalid_argument("report: " + std::to_string(class_names.size()) +
                                    " class names for " + std::to_string(cm.classes) +
                                    "-class matrix");
    }
}

}  // namespace

void write_metrics_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                       const std::filesystem::path& path) {
    check_classes(cm, class_names);
    auto out = open_out(path);
    out << "metric,value\n";
    out << "accuracy," << fmt(cm.accuracy()) << '\n';
    const auto per_class = cm.per_class_accuracy();
    for (std::size_t c = 0; c < cm.classes; ++c) {
        out << "accuracy_" << csv_escape(class_names[c]) << ',' << fmt(per_class[c]) << '\n';
    }
    out << "samples," << cm.total() << '\n';
    finish(out, path);
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                         bool row_normalized, const std::filesystem::path& path) {
    check_classes(cm, class_names);
    auto out = open_out(path);
    out << "predicted\\true";
    for (const auto& name : class_names) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t p = 0; p < cm.classes; ++p) {
        out << csv_escape(class_names[p]);
        std::uint64_t row_sum = 0;
        for (std::size_t t = 0; t < cm.classes; ++t) row_sum += cm.at(p, t);
        for (std::size_t t = 0; t < cm.classes; ++t) {
            out << ',';
            if (row_normalized) {
                const double pct =
                    row_sum == 0 ? 0.0
                                 : 100.0 * static_cast<double>(cm.at(p, t)) /
                                       static_cast<double>(row_sum);
                out << fmt(pct);
            } else {
                out << cm.at(p, t);
            }
        }
        out << '\n';
    }
    finish(out, path);
}

void write_ablation_csv(const std::vector<VariantRuns>& runs, const std::filesystem::path& path) {
    if (runs.empty()) throw std::invalid_argument("report: no metrics to aggregate");
    auto out = open_out(path);
    out << "variant,mean_accuracy,std_accuracy,runs\n";
    for (const auto& vr : runs) {
        const Aggregate a = aggregate(vr.accuracies);  // throws on an empty run list
        out << csv_escape(vr.variant) << ',' << fmt(a.mean) << ',' << fmt(a.std_dev) << ','
            << vr.accuracies.size() << '\n';
    }
    finish(out, path);
}

void write_params_csv(const std::vector<std::pair<std::string, std::vector<ParamCount>>>& models,
                      const std::filesystem::path& path) {
    if (models.empty()) throw std::invalid_argument("report: no models to count");
    auto out = open_out(path);
    out << "model,layer,parameters\n";
    for (const auto& [model, layers] : models) {
        std::size_t total = 0;
        for (const auto& pc : layers) {
            out << csv_escape(model) << ',' << csv_escape(pc.name) << ',' << pc.count << '\n';
            total += pc.count;
        }
        out << csv_escape(model) << ",total," << total << '\n';
    }
    finish(out, path);
}

void write_grid_csvs(const GridResult& grid, const std::filesystem::path& dir) {
    if (grid.cells.empty()) throw std::invalid_argument("report: empty grid result");
    for (std::size_t bins : grid.spec.bins) {
        const std::filesystem::path path = dir / ("grid_bins" + std::to_string(bins) + ".csv");
        auto out = open_out(path);
        out << "hop\\window";
        for (std::size_t w : grid.spec.windows) out << ',' << w;
        out << '\n';
        for (std::size_t hop : grid.spec.hops) {
            out << hop;
            for (std::size_t window : grid.spec.windows) {
                const GridCell& cell = grid.cell(window, hop, bins);
                out << ',';
                switch (cell.status) {
                    case CellStatus::kOk: out << fmt(cell.mean_val_acc); break;
                    case CellStatus::kSkipped:
                        out << csv_escape("skipped(" + cell.reason + ")");
                        break;
                    case CellStatus::kFailed:
                        out << csv_escape("failed(" + cell.reason + ")");
                        break;
                }
            }
            out << '\n';
        }
        finish(out, path);
    }
}

void write_summary_json(const SummaryInfo& info, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tool_version"] = info.tool_version;
    j["config_hash"] = info.config_hash;
    j["manifest_hash"] = info.manifest_hash;
    j["seeds"] = info.seeds;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

}  // namespace nehd
