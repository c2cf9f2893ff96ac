#include "nehd/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nehd/loss.hpp"
#include "nehd/resample.hpp"
#include "nehd/rng.hpp"

namespace nehd {

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
    if (cfg.batch_size == 0) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (cfg.patience < 0) throw std::invalid_argument("train config: patience must be >= 0");
    if (cfg.patience > cfg.epochs) {
        throw std::invalid_argument("train config: patience " + std::to_string(cfg.patience) +
                                    " exceeds epochs " + std::to_string(cfg.epochs));
    }
    if (!(cfg.adam.learning_rate > 0.0)) {
        throw std::invalid_argument("train config: learning_rate must be positive");
    }
    if (cfg.num_runs < 1) throw std::invalid_argument("train config: num_runs must be >= 1");
}

namespace {

void validate(const IngestConfig& ingest) {
    if (ingest.target_rate <= 0) {
        throw std::invalid_argument("ingest config: target_rate must be positive");
    }
    if (!(ingest.segment_seconds > 0.0)) {
        throw std::invalid_argument("ingest config: segment_seconds must be positive");
    }
}

void append_entry_planes(const ManifestEntry& entry, const DatasetManifest& m,
                         const std::filesystem::path& root, const StftConfig& stft_cfg,
                         const IngestConfig& ingest, std::vector<LabeledPlane>& out) {
    std::filesystem::path wav_path(entry.path);
    if (wav_path.is_relative()) wav_path = root / wav_path;
    Waveform w = decode_wav_file(wav_path);
    w = resample(w, ingest.target_rate);
    const int label = static_cast<int>(m.label_index(entry.label));
    for (const Segment& seg : segment(w, ingest.segment_seconds, entry.source_id, entry.label)) {
        Spectrogram s = stft(seg, stft_cfg);
        LabeledPlane plane;
        plane.label = label;
        plane.segment_id = std::move(s.segment_id);
        plane.values = std::move(s.values);
        out.push_back(std::move(plane));
    }
}

}  // namespace

LoadedDataset load_dataset(const DatasetManifest& m, const std::filesystem::path& root,
                           const StftConfig& stft_cfg, const IngestConfig& ingest) {
    validate(stft_cfg);
    validate(ingest);

    LoadedDataset data;
    data.class_names = m.class_names;
    for (const auto& entry : m.entries) {
        auto* split = &data.train;
        if (entry.split == Split::kVal) split = &data.val;
        if (entry.split == Split::kTest) split = &data.test;
        append_entry_planes(entry, m, root, stft_cfg, ingest, *split);
    }

    if (data.train.empty()) {
        throw std::runtime_error("load_dataset: training split produced no segments");
    }
    NormAccumulator acc;
    for (const auto& plane : data.train) acc.add(plane.values);
    data.stats = acc.finish();

    normalize_planes(data.train, data.stats);
    normalize_planes(data.val, data.stats);
    normalize_planes(data.test, data.stats);
    return data;
}

std::vector<LabeledPlane> load_split(const DatasetManifest& m, const std::filesystem::path& root,
                                     Split split, const StftConfig& stft_cfg,
                                     const IngestConfig& ingest) {
    validate(stft_cfg);
    validate(ingest);
    std::vector<LabeledPlane> planes;
    for (const auto& entry : m.entries) {
        if (entry.split != split) continue;
        append_entry_planes(entry, m, root, stft_cfg, ingest, planes);
    }
    return planes;
}

void normalize_planes(std::vector<LabeledPlane>& planes, const NormStats& stats) {
    for (auto& plane : planes) normalize_in_place(plane.values, stats);
}

void save_history_csv(const TrainHistory& h, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("history: cannot open " + path.string() + " for writing");
    out << "epoch,train_loss,val_loss,val_acc\n";
    out.precision(9);
    for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
        out << (e + 1) << ',' << h.train_loss[e] << ',' << h.val_loss[e] << ',' << h.val_acc[e]
            << '\n';
    }
    if (!out) throw std::runtime_error("history: write failed for " + path.string());
}

namespace {

void check_split(const std::vector<LabeledPlane>& split, const char* name) {
    if (split.empty()) {
        throw std::runtime_error(std::string("train: split '") + name + "' is empty");
    }
}

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

// Also enforces the histogram range invariant on every evaluated sample.
EvalResult evaluate_split(const Model& m, const std::vector<LabeledPlane>& split) {
    const std::size_t classes = m.config.classes;
    double total_loss = 0.0;
    std::size_t correct = 0;
    for (const auto& sample : split) {
        const SampleCache cache = forward_one(m, sample.values);
        if (m.uses_histogram()) {
            for (std::size_t i = 0; i < cache.hist.pooled.size(); ++i) {
                const double v = cache.hist.pooled[i];
                if (!(v > 0.0) || v > 1.0) {
                    std::ostringstream os;
                    os << "histogram output " << v << " left (0,1] on segment '"
                       << sample.segment_id << "'";
                    throw std::runtime_error(os.str());
                }
            }
        }
        total_loss += cross_entropy_row(cache.logits.data(), classes, sample.label).loss;
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < classes; ++c) {
            if (cache.logits[c] > cache.logits[argmax]) argmax = c;
        }
        correct += static_cast<std::size_t>(argmax == static_cast<std::size_t>(sample.label));
    }
    EvalResult res;
    res.loss = total_loss / static_cast<double>(split.size());
    res.accuracy = static_cast<double>(correct) / static_cast<double>(split.size());
    return res;
}

// Hand-rolled Fisher-Yates: std::shuffle delegates to an
// implementation-defined distribution, which would break cross-toolchain
// reproducibility of training trajectories.
void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

}  // namespace

TrainResult train(const Model& init, const LoadedDataset& data, const TrainConfig& cfg) {
    validate(cfg);
    check_split(data.train, "train");
    check_split(data.val, "val");
    check_split(data.test, "test");

    const auto t_start = std::chrono::steady_clock::now();

    TrainResult result;
    result.model = init;
    Model& model = result.model;
    Model best = model;

    Adam adam(cfg.adam);
    const std::uint64_t shuffle_base = cfg.shuffle_seed.value_or(mix_seed(cfg.seed, "shuffle"));
    const std::size_t classes = model.config.classes;
    const int stop_after = std::max(cfg.patience, 1);

    TrainHistory& history = result.history;
    double best_acc = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    int no_improve = 0;

    std::vector<std::size_t> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto rng = make_rng(mix_seed(shuffle_base, static_cast<std::uint64_t>(epoch)));
        shuffle_indices(order, rng);

        auto params = model.parameters();
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double batch_n = static_cast<double>(end - start);
            ModelGrads grads = zero_grads(model);
            for (std::size_t i = start; i < end; ++i) {
                const LabeledPlane& sample = data.train[order[i]];
                const SampleCache cache = forward_one(model, sample.values);
                RowLoss row = cross_entropy_row(cache.logits.data(), classes, sample.label);
                epoch_loss += row.loss;
                for (double& g : row.grad) g /= batch_n;
                backward_one(model, sample.values, cache, row.grad.data(), grads);
            }
            adam.step(params, grads.aligned(model));
        }
        history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

        const EvalResult val = evaluate_split(model, data.val);
        history.val_loss.push_back(val.loss);
        history.val_acc.push_back(val.accuracy);

        // Patience counts epochs without an accuracy improvement; a tie on
        // accuracy does not reset it, but the snapshot prefers the tied epoch
        // with the lower validation loss (a saturated val split would
        // otherwise freeze the model at its first lucky epoch).
        if (val.accuracy > best_acc) {
            best_acc = val.accuracy;
            best_loss = val.loss;
            best = model;
            history.best_epoch = static_cast<std::size_t>(epoch);
            no_improve = 0;
        } else {
            if (val.accuracy == best_acc && val.loss < best_loss) {
                best_loss = val.loss;
                best = model;
                history.best_epoch = static_cast<std::size_t>(epoch);
            }
            no_improve += 1;
            if (no_improve >= stop_after) break;
        }
    }

    result.model = best;
    history.best_val_acc = best_acc;
    history.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace nehd
