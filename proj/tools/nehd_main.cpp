#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "nehd/checkpoint.hpp"
#include "nehd/gridsearch.hpp"
#include "nehd/hash.hpp"
#include "nehd/report.hpp"
#include "nehd/resample.hpp"
#include "nehd/rng.hpp"
#include "nehd/synth.hpp"
#include "nehd/tensor_io.hpp"
#include "nehd/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Output paths resolve against NEHD_OUT_ROOT unless absolute; input paths
// stay relative to the working directory.
fs::path resolve_out(const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) return path;
    if (const char* root = std::getenv("NEHD_OUT_ROOT")) return fs::path(root) / path;
    return path;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

struct Settings {
    // spectral
    std::size_t window_length = 6144;
    std::size_t hop_length = 4096;
    std::size_t freq_bins = 192;
    bool no_center_pad = false;
    std::string magnitude_scale = "log_power";
    // ingest
    int target_rate = 16000;
    double segment_seconds = 3.0;
    // model
    std::string variant = "nehd";
    std::size_t edge_filters = 8;
    std::size_t bins = 8;
    std::size_t pool_rows = 4;
    std::size_t pool_cols = 2;
    std::string edge_init = "sobel";
    std::string hist_init = "uniform_range";
    double hist_lo = -3.0;
    double hist_hi = 3.0;
    // training
    int epochs = 50;
    std::size_t batch_size = 128;
    int patience = 40;
    double learning_rate = 0.001;
    int runs = 1;
    // run control
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 keeps the OpenMP default
};

// The config file is applied as defaults before flags are parsed, so flags
// always win. Unknown keys are rejected.
void apply_config_file(const fs::path& path, Settings& s) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad config file " + path.string() + ": " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "window_length") s.window_length = value.get<std::size_t>();
        else if (key == "hop_length") s.hop_length = value.get<std::size_t>();
        else if (key == "freq_bins") s.freq_bins = value.get<std::size_t>();
        else if (key == "center_pad") s.no_center_pad = !value.get<bool>();
        else if (key == "magnitude_scale") s.magnitude_scale = value.get<std::string>();
        else if (key == "target_rate") s.target_rate = value.get<int>();
        else if (key == "segment_seconds") s.segment_seconds = value.get<double>();
        else if (key == "variant") s.variant = value.get<std::string>();
        else if (key == "edge_filters") s.edge_filters = value.get<std::size_t>();
        else if (key == "bins") s.bins = value.get<std::size_t>();
        else if (key == "pool_rows") s.pool_rows = value.get<std::size_t>();
        else if (key == "pool_cols") s.pool_cols = value.get<std::size_t>();
        else if (key == "edge_init") s.edge_init = value.get<std::string>();
        else if (key == "hist_init") s.hist_init = value.get<std::string>();
        else if (key == "hist_lo") s.hist_lo = value.get<double>();
        else if (key == "hist_hi") s.hist_hi = value.get<double>();
        else if (key == "epochs") s.epochs = value.get<int>();
        else if (key == "batch_size") s.batch_size = value.get<std::size_t>();
        else if (key == "patience") s.patience = value.get<int>();
        else if (key == "learning_rate") s.learning_rate = value.get<double>();
        else if (key == "runs") s.runs = value.get<int>();
        else if (key == "seed") s.seed = value.get<std::uint64_t>();
        else throw std::runtime_error("config file " + path.string() + ": unknown key '" + key + "'");
    }
}

// Finds --config/-c before CLI11 runs so the file can seed the defaults.
std::string prescan_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" || arg == "-c") {
            if (i + 1 < argc) return argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            return arg.substr(9);
        }
    }
    return "";
}

nehd::StftConfig stft_config(const Settings& s) {
    nehd::StftConfig cfg;
    cfg.window_length = s.window_length;
    cfg.hop_length = s.hop_length;
    cfg.freq_bins = s.freq_bins;
    cfg.center_pad = !s.no_center_pad;
    cfg.magnitude_scale = nehd::magnitude_scale_from_name(s.magnitude_scale);
    return cfg;
}

nehd::IngestConfig ingest_config(const Settings& s) {
    nehd::IngestConfig cfg;
    cfg.target_rate = s.target_rate;
    cfg.segment_seconds = s.segment_seconds;
    return cfg;
}

nehd::ModelConfig model_config(const Settings& s, std::size_t plane_rows, std::size_t plane_cols) {
    nehd::ModelConfig cfg;
    cfg.kind = nehd::variant_from_name(s.variant);
    cfg.freq_bins = plane_rows;
    cfg.frames = plane_cols;
    cfg.classes = 4;
    cfg.edge_filters = s.edge_filters;
    cfg.bins = s.bins;
    cfg.pool_rows = s.pool_rows;
    cfg.pool_cols = s.pool_cols;
    cfg.edge_init = nehd::edge_init_from_name(s.edge_init);
    cfg.hist_init = nehd::histogram_init_from_name(s.hist_init);
    cfg.hist_lo = s.hist_lo;
    cfg.hist_hi = s.hist_hi;
    return cfg;
}

nehd::TrainConfig train_config(const Settings& s) {
    nehd::TrainConfig cfg;
    cfg.epochs = s.epochs;
    cfg.batch_size = s.batch_size;
    cfg.patience = std::min(s.patience, s.epochs);
    cfg.adam.learning_rate = s.learning_rate;
    cfg.seed = s.seed;
    cfg.num_runs = s.runs;
    return cfg;
}

json settings_json(const Settings& s) {
    json j;
    j["window_length"] = s.window_length;
    j["hop_length"] = s.hop_length;
    j["freq_bins"] = s.freq_bins;
    j["center_pad"] = !s.no_center_pad;
    j["magnitude_scale"] = s.magnitude_scale;
    j["target_rate"] = s.target_rate;
    j["segment_seconds"] = s.segment_seconds;
    j["variant"] = s.variant;
    j["edge_filters"] = s.edge_filters;
    j["bins"] = s.bins;
    j["pool_rows"] = s.pool_rows;
    j["pool_cols"] = s.pool_cols;
    j["edge_init"] = s.edge_init;
    j["hist_init"] = s.hist_init;
    j["hist_lo"] = s.hist_lo;
    j["hist_hi"] = s.hist_hi;
    j["epochs"] = s.epochs;
    j["batch_size"] = s.batch_size;
    j["patience"] = std::min(s.patience, s.epochs);
    j["learning_rate"] = s.learning_rate;
    j["runs"] = s.runs;
    j["seed"] = s.seed;
    return j;
}

// Every run directory gets the fully resolved configuration it ran with.
// The destination directory is deliberately absent: the resolved config
// identifies the experiment (inputs, parameters, seed), so the same run
// written to a different location produces byte-identical artifacts and the
// same config hash.
std::string write_resolved_config(const fs::path& dir, const std::string& subcommand, json extra) {
    extra["subcommand"] = subcommand;
    extra["tool_version"] = nehd::kToolVersion;
    const fs::path path = dir / "resolved_config.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << extra.dump(2) << '\n';
    out.close();
    return nehd::content_hash_file(path);
}

void add_spectral_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("--window", s.window_length, "STFT window length in samples")
        ->capture_default_str();
    cmd->add_option("--hop", s.hop_length, "STFT hop length in samples")->capture_default_str();
    cmd->add_option("--freq-bins", s.freq_bins, "retained lowest frequency bins")
        ->capture_default_str();
    cmd->add_flag("--no-center-pad", s.no_center_pad, "disable reflect center padding");
    cmd->add_option("--magnitude-scale", s.magnitude_scale, "log_power or linear")
        ->capture_default_str();
}

void add_ingest_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("--target-rate", s.target_rate, "resample rate in Hz")->capture_default_str();
    cmd->add_option("--segment-seconds", s.segment_seconds, "segment window in seconds")
        ->capture_default_str();
}

void add_model_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("--variant", s.variant,
                    "linear_baseline | edge_only | histogram_only | nehd (short aliases accepted)")
        ->capture_default_str();
    cmd->add_option("--edge-filters", s.edge_filters, "edge filter count B")->capture_default_str();
    cmd->add_option("--bins", s.bins, "histogram bin count")->capture_default_str();
    cmd->add_option("--pool-rows", s.pool_rows, "pooling window rows (frequency)")
        ->capture_default_str();
    cmd->add_option("--pool-cols", s.pool_cols, "pooling window cols (time)")->capture_default_str();
    cmd->add_option("--edge-init", s.edge_init, "sobel or random")->capture_default_str();
    cmd->add_option("--hist-init", s.hist_init, "uniform_range or random")->capture_default_str();
    cmd->add_option("--hist-lo", s.hist_lo, "histogram range low")->capture_default_str();
    cmd->add_option("--hist-hi", s.hist_hi, "histogram range high")->capture_default_str();
}

void add_train_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("--epochs", s.epochs, "training epochs")->capture_default_str();
    cmd->add_option("--batch-size", s.batch_size, "mini-batch size")->capture_default_str();
    cmd->add_option("--patience", s.patience, "early-stopping patience in epochs (clamped to --epochs)")
        ->capture_default_str();
    cmd->add_option("--learning-rate", s.learning_rate, "Adam learning rate")
        ->capture_default_str();
    cmd->add_option("--runs", s.runs,
                    "independent runs; run r>0 trains with a seed derived from --seed")
        ->capture_default_str();
}

void add_run_options(CLI::App* cmd, Settings& s, std::string* config_path) {
    cmd->add_option("--seed", s.seed, "master random seed")->capture_default_str();
    cmd->add_option("--jobs", s.jobs, "worker threads (1 = sequential deterministic)")
        ->capture_default_str();
    cmd->add_option("--config,-c", *config_path, "JSON config file; flags override its values");
}

void apply_jobs(const Settings& s) {
#ifdef _OPENMP
    if (s.jobs >= 1) omp_set_num_threads(s.jobs);
#else
    (void)s;
#endif
}

int run_synth(const Settings& s, const std::string& out_dir_raw, double train_ratio,
              double val_ratio, double test_ratio, int per_class, double duration, double snr_db) {
    nehd::SynthSpec spec;
    spec.per_class_sources = per_class;
    spec.duration_seconds = duration;
    spec.sample_rate = s.target_rate;
    spec.seed = s.seed;
    spec.snr_db = snr_db;

    const fs::path out_dir = resolve_out(out_dir_raw);
    ensure_dir(out_dir);
    const nehd::DatasetManifest manifest =
        nehd::build_corpus(spec, out_dir, {train_ratio, val_ratio, test_ratio});

    json extra = {{"per_class_sources", per_class}, {"duration_seconds", duration},
                  {"sample_rate", s.target_rate},   {"snr_db", snr_db},
                  {"seed", s.seed},                 {"ratios", {train_ratio, val_ratio, test_ratio}}};
    const std::string config_hash = write_resolved_config(out_dir, "synth", extra);

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(out_dir / "manifest.jsonl");
    info.seeds = {s.seed};
    nehd::write_summary_json(info, out_dir / "summary.json");

    std::cout << "wrote " << manifest.entries.size() << " sources to " << out_dir.string() << "\n";
    return 0;
}

int run_ingest(const Settings& s, const std::string& in_dir_raw, const std::string& out_raw,
               double train_ratio, double val_ratio, double test_ratio) {
    const fs::path in_dir(in_dir_raw);
    if (!fs::is_directory(in_dir)) {
        throw std::runtime_error("ingest: " + in_dir.string() + " is not a directory");
    }

    // Layout contract: one subdirectory per class label, WAV files inside.
    std::vector<nehd::SourceRecord> sources;
    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    for (const auto& dir : class_dirs) {
        const std::string label = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".wav") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            nehd::SourceRecord rec;
            rec.source_id = label + "_" + f.stem().string();
            rec.path = (fs::path(label) / f.filename()).string();
            rec.label = label;
            sources.push_back(std::move(rec));
        }
    }
    if (sources.empty()) {
        throw std::runtime_error("ingest: no <label>/<name>.wav files under " + in_dir.string());
    }

    const nehd::DatasetManifest manifest =
        nehd::split_dataset(sources, {train_ratio, val_ratio, test_ratio}, s.seed);
    const fs::path out_path =
        out_raw.empty() ? in_dir / "manifest.jsonl" : resolve_out(out_raw);
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    nehd::save_manifest(manifest, out_path);

    json extra = {{"in_dir", in_dir.string()},
                  {"seed", s.seed},
                  {"ratios", {train_ratio, val_ratio, test_ratio}}};
    write_resolved_config(out_path.parent_path(), "ingest", extra);

    std::cout << "manifested " << sources.size() << " sources into " << out_path.string() << "\n";
    return 0;
}

int run_featurize(const Settings& s, const std::string& manifest_raw, const std::string& out_raw,
                  bool also_csv) {
    const fs::path manifest_path(manifest_raw);
    const nehd::DatasetManifest manifest = nehd::load_manifest(manifest_path);
    const fs::path root = manifest_path.parent_path();
    const fs::path out_dir = resolve_out(out_raw);
    ensure_dir(out_dir);

    const nehd::StftConfig stft_cfg = stft_config(s);
    const nehd::IngestConfig ingest = ingest_config(s);

    struct IndexRow {
        std::string file, source_id, label, split;
    };
    std::vector<std::vector<IndexRow>> per_entry(manifest.entries.size());

    // Entries are independent; OpenMP fans them out under --jobs while the
    // index keeps manifest order.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(manifest.entries.size()); ++i) {
        try {
            const auto& entry = manifest.entries[static_cast<std::size_t>(i)];
            fs::path wav_path(entry.path);
            if (wav_path.is_relative()) wav_path = root / wav_path;
            nehd::Waveform w = nehd::decode_wav_file(wav_path);
            w = nehd::resample(w, ingest.target_rate);
            const auto segments =
                nehd::segment(w, ingest.segment_seconds, entry.source_id, entry.label);
            for (std::size_t k = 0; k < segments.size(); ++k) {
                const nehd::Tensor values = nehd::stft(segments[k].samples, stft_cfg);
                const std::string base = entry.source_id + "_seg" + std::to_string(k);
                nehd::save_tensor(values, out_dir / (base + ".tnsr"));
                if (also_csv) nehd::write_csv(values, out_dir / (base + ".csv"));
                per_entry[static_cast<std::size_t>(i)].push_back(
                    {base + ".tnsr", entry.source_id, entry.label,
                     nehd::split_name(entry.split)});
            }
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::size_t total = 0;
    std::ofstream index(out_dir / "features.csv");
    if (!index) throw std::runtime_error("cannot write " + (out_dir / "features.csv").string());
    index << "file,source_id,label,split\n";
    for (const auto& rows : per_entry) {
        for (const auto& row : rows) {
            index << row.file << ',' << row.source_id << ',' << row.label << ',' << row.split
                  << '\n';
            total += 1;
        }
    }
    index.close();

    json extra = settings_json(s);
    extra["manifest"] = manifest_path.string();
    const std::string config_hash = write_resolved_config(out_dir, "featurize", extra);

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(manifest_path);
    info.seeds = {s.seed};
    nehd::write_summary_json(info, out_dir / "summary.json");

    std::cout << "featurized " << total << " segments into " << out_dir.string() << "\n";
    return 0;
}

nehd::CheckpointMeta make_meta(const Settings& s, const nehd::ModelConfig& mc,
                               const nehd::DatasetManifest& manifest,
                               const fs::path& manifest_path, std::uint64_t seed) {
    nehd::CheckpointMeta meta;
    meta.tool_version = nehd::kToolVersion;
    meta.model = mc;
    meta.stft = stft_config(s);
    meta.ingest = ingest_config(s);
    meta.seed = seed;
    meta.class_names = manifest.class_names;
    meta.manifest_hash = nehd::content_hash_file(manifest_path);
    return meta;
}

int run_train(const Settings& s, const std::string& manifest_raw, const std::string& out_raw) {
    const fs::path manifest_path(manifest_raw);
    const nehd::DatasetManifest manifest = nehd::load_manifest(manifest_path);
    const fs::path root = manifest_path.parent_path();
    const fs::path out_dir = resolve_out(out_raw);
    ensure_dir(out_dir);

    const nehd::StftConfig stft_cfg = stft_config(s);
    const nehd::IngestConfig ingest = ingest_config(s);
    const nehd::LoadedDataset data = nehd::load_dataset(manifest, root, stft_cfg, ingest);
    if (data.class_names.size() != 4) {
        throw std::runtime_error("train: expected a 4-class manifest, got " +
                                 std::to_string(data.class_names.size()) + " classes");
    }

    const std::size_t frames = data.train.front().values.dim(1);
    const nehd::ModelConfig mc = model_config(s, stft_cfg.freq_bins, frames);

    json extra = settings_json(s);
    extra["manifest"] = manifest_path.string();
    extra["frames"] = frames;
    const std::string config_hash = write_resolved_config(out_dir, "train", extra);

    std::vector<std::uint64_t> seeds;
    std::vector<double> best_accs;
    for (int r = 0; r < s.runs; ++r) {
        const std::uint64_t run_seed =
            r == 0 ? s.seed : nehd::mix_seed(s.seed, static_cast<std::uint64_t>(r));
        seeds.push_back(run_seed);

        nehd::TrainConfig tc = train_config(s);
        tc.seed = run_seed;
        const nehd::Model init = nehd::build_model(mc, run_seed);
        nehd::TrainResult result = nehd::train(init, data, tc);

        const fs::path run_dir = s.runs == 1 ? out_dir : out_dir / ("run" + std::to_string(r));
        ensure_dir(run_dir);
        nehd::save_history_csv(result.history, run_dir / "history.csv");
        const nehd::CheckpointMeta meta = make_meta(s, mc, manifest, manifest_path, run_seed);
        nehd::save_checkpoint(result.model, data.stats, meta, run_dir / "checkpoint.bin");
        best_accs.push_back(result.history.best_val_acc);
        std::cout << "run " << r << ": best val accuracy " << result.history.best_val_acc
                  << " at epoch " << (result.history.best_epoch + 1) << "\n";
    }

    if (s.runs > 1) {
        nehd::write_ablation_csv({{s.variant, best_accs}}, out_dir / "val_accuracy.csv");
    }

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(manifest_path);
    info.seeds = seeds;
    nehd::write_summary_json(info, out_dir / "summary.json");
    return 0;
}

int run_evaluate(const Settings& s, const std::string& checkpoint_raw,
                 const std::string& manifest_raw, const std::string& split_name_raw,
                 const std::string& out_raw, const std::vector<const CLI::Option*>& spectral_opts) {
    const nehd::LoadedCheckpoint ckpt = nehd::load_checkpoint(checkpoint_raw);

    // Spectral flags are optional here; when given they must agree with the
    // checkpoint, because features must match the trained normalizer.
    bool overridden = false;
    for (const auto* opt : spectral_opts) overridden |= opt->count() > 0;
    if (overridden) {
        const nehd::StftConfig given = stft_config(s);
        const nehd::StftConfig& trained = ckpt.meta.stft;
        if (given.window_length != trained.window_length ||
            given.hop_length != trained.hop_length || given.freq_bins != trained.freq_bins ||
            given.center_pad != trained.center_pad ||
            given.magnitude_scale != trained.magnitude_scale) {
            throw std::runtime_error(
                "evaluate: spectral config mismatch with the checkpoint (trained with window " +
                std::to_string(trained.window_length) + ", hop " +
                std::to_string(trained.hop_length) + ", bins " +
                std::to_string(trained.freq_bins) + ")");
        }
    }

    const fs::path manifest_path(manifest_raw);
    const nehd::DatasetManifest manifest = nehd::load_manifest(manifest_path);
    if (manifest.class_names != ckpt.meta.class_names) {
        throw std::runtime_error("evaluate: manifest classes do not match the checkpoint");
    }

    const nehd::Split split = nehd::split_from_name(split_name_raw);
    std::vector<nehd::LabeledPlane> planes = nehd::load_split(
        manifest, manifest_path.parent_path(), split, ckpt.meta.stft, ckpt.meta.ingest);
    if (planes.empty()) {
        throw std::runtime_error("evaluate: split '" + split_name_raw + "' has no segments");
    }
    nehd::normalize_planes(planes, ckpt.stats);

    std::vector<int> preds;
    std::vector<int> labels;
    preds.reserve(planes.size());
    labels.reserve(planes.size());
    for (const auto& plane : planes) {
        const nehd::SampleCache cache = nehd::forward_one(ckpt.model, plane.values);
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < ckpt.model.config.classes; ++c) {
            if (cache.logits[c] > cache.logits[argmax]) argmax = c;
        }
        preds.push_back(static_cast<int>(argmax));
        labels.push_back(plane.label);
    }

    const nehd::ConfusionMatrix cm =
        nehd::confusion(preds, labels, ckpt.model.config.classes);

    const fs::path out_dir = resolve_out(out_raw);
    ensure_dir(out_dir);
    nehd::write_metrics_csv(cm, manifest.class_names, out_dir / "metrics.csv");
    nehd::write_confusion_csv(cm, manifest.class_names, false, out_dir / "confusion_counts.csv");
    nehd::write_confusion_csv(cm, manifest.class_names, true, out_dir / "confusion_rownorm.csv");

    json extra = {{"checkpoint", checkpoint_raw},
                  {"manifest", manifest_path.string()},
                  {"split", split_name_raw}};
    const std::string config_hash = write_resolved_config(out_dir, "evaluate", extra);

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(manifest_path);
    info.seeds = {ckpt.meta.seed};
    nehd::write_summary_json(info, out_dir / "summary.json");

    std::cout << "accuracy " << cm.accuracy() << " on " << cm.total() << " segments\n";
    return 0;
}

int run_gridsearch(const Settings& s, const std::string& manifest_raw, const std::string& out_raw,
                   const std::vector<std::size_t>& windows, const std::vector<std::size_t>& hops,
                   const std::vector<std::size_t>& bins_list, int runs_per_cell) {
    const fs::path manifest_path(manifest_raw);
    const nehd::DatasetManifest manifest = nehd::load_manifest(manifest_path);
    const fs::path out_dir = resolve_out(out_raw);
    ensure_dir(out_dir);

    nehd::GridSpec grid;
    if (!windows.empty()) grid.windows = windows;
    if (!hops.empty()) grid.hops = hops;
    if (!bins_list.empty()) grid.bins = bins_list;
    grid.runs_per_cell = runs_per_cell;

    const nehd::ModelConfig mc = model_config(s, 0, 0);  // dims filled per cell
    const nehd::GridResult result = nehd::grid_search(
        grid, manifest, manifest_path.parent_path(), mc, train_config(s), ingest_config(s));
    nehd::write_grid_csvs(result, out_dir);

    json extra = settings_json(s);
    extra["manifest"] = manifest_path.string();
    extra["windows"] = grid.windows;
    extra["hops"] = grid.hops;
    extra["bins_list"] = grid.bins;
    extra["runs_per_cell"] = runs_per_cell;
    const std::string config_hash = write_resolved_config(out_dir, "gridsearch", extra);

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(manifest_path);
    info.seeds = {s.seed};
    nehd::write_summary_json(info, out_dir / "summary.json");

    std::cout << "grid complete: " << result.cells.size() << " cells in " << out_dir.string()
              << "\n";
    return 0;
}

int run_export_features(const std::string& checkpoint_raw, const std::string& manifest_raw,
                        const std::string& split_name_raw, const std::string& out_raw) {
    const nehd::LoadedCheckpoint ckpt = nehd::load_checkpoint(checkpoint_raw);
    if (ckpt.model.config.kind != nehd::VariantKind::kNehd) {
        throw std::runtime_error(
            std::string("export-features: checkpoint holds the ") +
            nehd::variant_name(ckpt.model.config.kind) + " variant, needs nehd");
    }

    const fs::path manifest_path(manifest_raw);
    const nehd::DatasetManifest manifest = nehd::load_manifest(manifest_path);
    const nehd::Split split = nehd::split_from_name(split_name_raw);
    std::vector<nehd::LabeledPlane> planes = nehd::load_split(
        manifest, manifest_path.parent_path(), split, ckpt.meta.stft, ckpt.meta.ingest);
    if (planes.empty()) {
        throw std::runtime_error("export-features: split '" + split_name_raw +
                                 "' has no segments");
    }
    nehd::normalize_planes(planes, ckpt.stats);

    const fs::path out_dir = resolve_out(out_raw);
    ensure_dir(out_dir);
    std::ofstream index(out_dir / "features.csv");
    if (!index) throw std::runtime_error("cannot write " + (out_dir / "features.csv").string());
    index << "file,segment_id,label\n";
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const nehd::Tensor stacked = nehd::export_features(ckpt.model, planes[i].values);
        const std::string name = "features_" + std::to_string(i) + ".tnsr";
        nehd::save_tensor(stacked, out_dir / name);
        index << name << ',' << planes[i].segment_id << ',' << planes[i].label << '\n';
    }
    index.close();

    json extra = {{"checkpoint", checkpoint_raw},
                  {"manifest", manifest_path.string()},
                  {"split", split_name_raw}};
    const std::string config_hash = write_resolved_config(out_dir, "export-features", extra);

    nehd::SummaryInfo info;
    info.tool_version = nehd::kToolVersion;
    info.config_hash = config_hash;
    info.manifest_hash = nehd::content_hash_file(manifest_path);
    info.seeds = {ckpt.meta.seed};
    nehd::write_summary_json(info, out_dir / "summary.json");

    std::cout << "exported " << planes.size() << " stacked feature tensors to "
              << out_dir.string() << "\n";
    return 0;
}

int run_count_params(const Settings& s, std::size_t plane_rows, std::size_t plane_cols,
                     bool breakdown) {
    const nehd::ModelConfig mc = model_config(s, plane_rows, plane_cols);
    const nehd::Model model = nehd::build_model(mc, s.seed);
    if (breakdown) {
        for (const auto& pc : nehd::count_parameters(model)) {
            std::cout << pc.name << " " << pc.count << "\n";
        }
        std::cout << "total " << nehd::total_parameters(model) << "\n";
    } else {
        std::cout << nehd::total_parameters(model) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural edge histogram descriptor pipeline for passive-sonar spectrograms"};
    app.require_subcommand(1);

    Settings s;
    std::string config_path = prescan_config(argc, argv);
    try {
        if (!config_path.empty()) apply_config_file(config_path, s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    // synth
    std::string synth_out = "corpus";
    int per_class = 20;
    double duration = 9.0;
    double snr_db = 10.0;
    double train_ratio = 0.7, val_ratio = 0.1, test_ratio = 0.2;
    auto* synth = app.add_subcommand("synth", "generate the synthetic 4-class corpus");
    synth->add_option("--out", synth_out, "output directory")->capture_default_str();
    synth->add_option("--per-class", per_class, "sources per class")->capture_default_str();
    synth->add_option("--duration", duration, "source duration in seconds")->capture_default_str();
    synth->add_option("--snr-db", snr_db, "white-noise SNR in dB (inf disables)")
        ->capture_default_str();
    synth->add_option("--train-ratio", train_ratio, "train split ratio")->capture_default_str();
    synth->add_option("--val-ratio", val_ratio, "validation split ratio")->capture_default_str();
    synth->add_option("--test-ratio", test_ratio, "test split ratio")->capture_default_str();
    synth->add_option("--rate", s.target_rate, "sample rate in Hz")->capture_default_str();
    add_run_options(synth, s, &config_path);

    // ingest
    std::string ingest_in;
    std::string ingest_out;
    auto* ingest = app.add_subcommand("ingest", "manifest a directory of <label>/<name>.wav files");
    ingest->add_option("--in", ingest_in, "input directory")->required();
    ingest->add_option("--out", ingest_out, "manifest path (default <in>/manifest.jsonl)");
    ingest->add_option("--train-ratio", train_ratio, "train split ratio")->capture_default_str();
    ingest->add_option("--val-ratio", val_ratio, "validation split ratio")->capture_default_str();
    ingest->add_option("--test-ratio", test_ratio, "test split ratio")->capture_default_str();
    add_run_options(ingest, s, &config_path);

    // featurize
    std::string manifest_arg;
    std::string featurize_out = "features";
    bool also_csv = false;
    auto* featurize = app.add_subcommand("featurize", "write spectrogram tensor files per segment");
    featurize->add_option("--manifest", manifest_arg, "dataset manifest")->required();
    featurize->add_option("--out", featurize_out, "output directory")->capture_default_str();
    featurize->add_flag("--csv", also_csv, "also write CSV next to each tensor");
    add_spectral_options(featurize, s);
    add_ingest_options(featurize, s);
    add_run_options(featurize, s, &config_path);

    // train
    std::string train_out = "train_run";
    auto* train_cmd = app.add_subcommand("train", "train a variant; writes checkpoint and history");
    train_cmd->add_option("--manifest", manifest_arg, "dataset manifest")->required();
    train_cmd->add_option("--out", train_out, "run directory")->capture_default_str();
    add_spectral_options(train_cmd, s);
    add_ingest_options(train_cmd, s);
    add_model_options(train_cmd, s);
    add_train_options(train_cmd, s);
    add_run_options(train_cmd, s, &config_path);

    // evaluate
    std::string ckpt_arg;
    std::string split_arg = "test";
    std::string eval_out = "eval";
    auto* evaluate = app.add_subcommand("evaluate", "metrics and confusion for a checkpoint");
    evaluate->add_option("--checkpoint", ckpt_arg, "checkpoint file")->required();
    evaluate->add_option("--manifest", manifest_arg, "dataset manifest")->required();
    evaluate->add_option("--split", split_arg, "train | val | test")->capture_default_str();
    evaluate->add_option("--out", eval_out, "output directory")->capture_default_str();
    std::vector<const CLI::Option*> eval_spectral;
    eval_spectral.push_back(
        evaluate->add_option("--window", s.window_length, "must match the checkpoint"));
    eval_spectral.push_back(evaluate->add_option("--hop", s.hop_length, "must match the checkpoint"));
    eval_spectral.push_back(
        evaluate->add_option("--freq-bins", s.freq_bins, "must match the checkpoint"));
    add_run_options(evaluate, s, &config_path);

    // gridsearch
    std::string grid_out = "grid";
    std::vector<std::size_t> grid_windows, grid_hops, grid_bins;
    int runs_per_cell = 1;
    auto* grid = app.add_subcommand("gridsearch", "validation-accuracy sweep over STFT configs");
    grid->add_option("--manifest", manifest_arg, "dataset manifest")->required();
    grid->add_option("--out", grid_out, "output directory")->capture_default_str();
    grid->add_option("--windows", grid_windows, "window candidates (default 2048 4096 6144)");
    grid->add_option("--hops", grid_hops, "hop candidates (default 1024 2048 4096)");
    grid->add_option("--bins-list", grid_bins, "bin-count candidates (default 48 96 192)");
    grid->add_option("--runs-per-cell", runs_per_cell, "training runs per cell")
        ->capture_default_str();
    add_ingest_options(grid, s);
    add_model_options(grid, s);
    add_train_options(grid, s);
    add_run_options(grid, s, &config_path);

    // export-features
    std::string export_out = "exported";
    auto* exportf = app.add_subcommand("export-features",
                                       "stack normalized STFT with upsampled histogram maps");
    exportf->add_option("--checkpoint", ckpt_arg, "nehd checkpoint")->required();
    exportf->add_option("--manifest", manifest_arg, "dataset manifest")->required();
    exportf->add_option("--split", split_arg, "train | val | test")->capture_default_str();
    exportf->add_option("--out", export_out, "output directory")->capture_default_str();
    add_run_options(exportf, s, &config_path);

    // count-params
    std::size_t cp_rows = 192;
    std::size_t cp_cols = 12;
    bool breakdown = false;
    auto* countp = app.add_subcommand("count-params", "print the trainable parameter count");
    countp->add_option("--freq-bins", cp_rows, "input plane rows")->capture_default_str();
    countp->add_option("--frames", cp_cols, "input plane cols")->capture_default_str();
    countp->add_flag("--breakdown", breakdown, "per-layer counts");
    add_model_options(countp, s);
    add_run_options(countp, s, &config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        apply_jobs(s);
        if (synth->parsed()) {
            return run_synth(s, synth_out, train_ratio, val_ratio, test_ratio, per_class, duration,
                             snr_db);
        }
        if (ingest->parsed()) {
            return run_ingest(s, ingest_in, ingest_out, train_ratio, val_ratio, test_ratio);
        }
        if (featurize->parsed()) return run_featurize(s, manifest_arg, featurize_out, also_csv);
        if (train_cmd->parsed()) return run_train(s, manifest_arg, train_out);
        if (evaluate->parsed()) {
            return run_evaluate(s, ckpt_arg, manifest_arg, split_arg, eval_out, eval_spectral);
        }
        if (grid->parsed()) {
            return run_gridsearch(s, manifest_arg, grid_out, grid_windows, grid_hops, grid_bins,
                                  runs_per_cell);
        }
        if (exportf->parsed()) return run_export_features(ckpt_arg, manifest_arg, split_arg, export_out);
        if (countp->parsed()) return run_count_params(s, cp_rows, cp_cols, breakdown);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
