// Acceptance harness: one numbered check per release criterion, each printed
// as a single PASS/FAIL line with its measured evidence. Run with no
// arguments for the full set, or select checks with --criterion N
// (repeatable). Exit code is 0 only when every selected criterion passes.
//
// Heavy criteria (5, 6, 7, 9) share one synthetic corpus, cached on disk
// under --corpus-dir (default ./acceptance_corpus) and reused across
// invocations; the generator is bit-deterministic, so the cache never goes
// stale. Delete the directory to force a rebuild.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "nehd/conv2d.hpp"
#include "nehd/dataset.hpp"
#include "nehd/edge_block.hpp"
#include "nehd/gridsearch.hpp"
#include "nehd/histogram_layer.hpp"
#include "nehd/loss.hpp"
#include "nehd/model.hpp"
#include "nehd/pooling.hpp"
#include "nehd/reference.hpp"
#include "nehd/rng.hpp"
#include "nehd/stft.hpp"
#include "nehd/synth.hpp"
#include "nehd/train.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v, int precision = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

// ---------------------------------------------------------------------------
// shared corpus, dataset, and training results
// ---------------------------------------------------------------------------

struct Shared {
    fs::path corpus_dir = "acceptance_corpus";

    bool corpus_ready = false;
    nehd::DatasetManifest manifest;

    bool data_ready = false;
    nehd::LoadedDataset data;

    // variant name -> test accuracies over the three protocol seeds
    std::map<std::string, std::vector<double>> accs;

    const nehd::DatasetManifest& corpus();
    const nehd::LoadedDataset& dataset();
    const std::vector<double>& test_accuracies(nehd::VariantKind kind);
};

const nehd::DatasetManifest& Shared::corpus() {
    if (corpus_ready) return manifest;
    const fs::path manifest_path = corpus_dir / "manifest.jsonl";
    if (fs::exists(manifest_path)) {
        try {
            nehd::DatasetManifest cached = nehd::load_manifest(manifest_path);
            if (cached.entries.size() == 80 &&
                fs::exists(corpus_dir / cached.entries.front().path)) {
                manifest = std::move(cached);
                corpus_ready = true;
                return manifest;
            }
        } catch (const std::exception&) {
            // fall through and rebuild
        }
        fs::remove_all(corpus_dir);
    }
    nehd::SynthSpec spec;  // default: 20 sources/class, 9 s, 16 kHz, seed 0
    manifest = nehd::build_corpus(spec, corpus_dir);
    corpus_ready = true;
    return manifest;
}

const nehd::LoadedDataset& Shared::dataset() {
    if (data_ready) return data;
    const nehd::DatasetManifest& m = corpus();
    nehd::StftConfig stft_cfg;    // 6144 / 4096 / 192, center, log power
    nehd::IngestConfig ingest;    // 16 kHz, 3 s segments
    data = nehd::load_dataset(m, corpus_dir, stft_cfg, ingest);
    data_ready = true;
    return data;
}

double split_accuracy(const nehd::Model& m, const std::vector<nehd::LabeledPlane>& split) {
    std::size_t hits = 0;
    for (const auto& s : split) {
        const nehd::SampleCache cache = nehd::forward_one(m, s.values);
        std::size_t best = 0;
        for (std::size_t c = 1; c < cache.logits.size(); ++c) {
            if (cache.logits[c] > cache.logits[best]) best = c;
        }
        if (static_cast<int>(best) == s.label) hits += 1;
    }
    return static_cast<double>(hits) / static_cast<double>(split.size());
}

const std::vector<double>& Shared::test_accuracies(nehd::VariantKind kind) {
    const std::string key = nehd::variant_name(kind);
    auto it = accs.find(key);
    if (it != accs.end()) return it->second;

    const nehd::LoadedDataset& d = dataset();

    nehd::ModelConfig mc;  // default geometry: 192 x 12, B=8, 8 bins, 4x2 pool
    mc.kind = kind;
    nehd::TrainConfig tc;  // protocol: 50 epochs, batch 128, patience 40, lr 1e-3
    tc.epochs = 50;
    tc.batch_size = 128;
    tc.patience = 40;
    tc.adam.learning_rate = 0.001;

    std::vector<double> result;
    for (int r = 0; r < 3; ++r) {
        const std::uint64_t run_seed =
            r == 0 ? 0 : nehd::mix_seed(0, static_cast<std::uint64_t>(r));
        tc.seed = run_seed;
        tc.shuffle_seed.reset();
        const nehd::Model init = nehd::build_model(mc, run_seed);
        const nehd::TrainResult tr = nehd::train(init, d, tc);
        result.push_back(split_accuracy(tr.model, d.test));
    }
    return accs.emplace(key, std::move(result)).first->second;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string join_accs(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += "/";
        out += fmt(v[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// criterion 1: stft geometry
// ---------------------------------------------------------------------------

Outcome criterion_1(Shared&) {
    std::vector<double> samples(48000);  // 3 s at 16 kHz
    auto rng = nehd::make_rng(1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = 0.5 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / 16000.0) +
                     0.1 * nehd::uniform(rng, -1.0, 1.0);
    }
    nehd::StftConfig cfg;  // window 6144, hop 4096, 192 bins, center padding

    const double t0 = now_seconds();
    const nehd::Tensor plane = nehd::stft(samples, cfg);
    const double elapsed = now_seconds() - t0;

    const bool dims_ok = plane.rank() == 2 && plane.dim(0) == 192 && plane.dim(1) == 12;
    const bool time_ok = elapsed < 1.0;
    Outcome o;
    o.pass = dims_ok && time_ok && plane.all_finite();
    o.detail = "3 s at 16 kHz -> " + std::to_string(plane.dim(0)) + "x" +
               std::to_string(plane.dim(1)) + " plane in " + fmt(elapsed) + " s (limit 1 s)";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 2: gradient suite
// ---------------------------------------------------------------------------

double conv_fd_worst(std::uint64_t seed, int shape_idx) {
    auto rng = nehd::make_rng(nehd::mix_seed(seed, "accept_conv"));
    struct Case {
        std::size_t cin, rows, cols, filters, k;
        nehd::Padding pad;
        bool bias;
    };
    const Case cases[3] = {
        {1, 5, 6, 3, 3, nehd::Padding::kSameZero, true},
        {2, 4, 5, 2, 3, nehd::Padding::kValid, false},
        {1, 6, 4, 4, 1, nehd::Padding::kSameZero, true},
    };
    const Case& c = cases[shape_idx];

    nehd::Tensor x = testutil::random_tensor({c.cin, c.rows, c.cols}, rng);
    nehd::FilterBank fb;
    fb.weights = testutil::random_tensor({c.filters, c.cin, c.k, c.k}, rng);
    if (c.bias) fb.bias = testutil::random_tensor({c.filters}, rng, -0.5, 0.5);
    fb.padding = c.pad;

    const nehd::Tensor out = nehd::conv2d_forward(x, fb);
    const nehd::Tensor proj = testutil::random_tensor(out.shape(), rng);
    const nehd::ConvGrads grads = nehd::conv2d_backward(x, fb, proj);

    auto loss = [&]() { return testutil::dot(nehd::conv2d_forward(x, fb), proj); };
    double worst = testutil::fd_check(x, grads.input, loss);
    worst = std::max(worst, testutil::fd_check(fb.weights, grads.weights, loss));
    if (c.bias) worst = std::max(worst, testutil::fd_check(fb.bias, grads.bias, loss));
    return worst;
}

double edge_fd_worst(std::uint64_t seed, int shape_idx) {
    auto rng = nehd::make_rng(nehd::mix_seed(seed, "accept_edge"));
    struct Case {
        std::size_t b, rows, cols;
    };
    const Case cases[3] = {{2, 5, 5}, {4, 4, 6}, {3, 6, 4}};
    const Case& c = cases[shape_idx];

    nehd::EdgeParams p = nehd::init_edge_filters(nehd::EdgeInit::kRandom, c.b, seed);
    // push the no-edge branch off its symmetric starting point
    for (std::size_t i = 0; i < p.noedge_conv.weights.size(); ++i) {
        p.noedge_conv.weights[i] += nehd::uniform(rng, -0.3, 0.3);
    }
    p.noedge_conv.bias[0] += nehd::uniform(rng, -0.3, 0.3);

    nehd::Tensor plane = testutil::random_tensor({c.rows, c.cols}, rng);
    const nehd::FeatureMaps out = nehd::edge_block_forward(plane, p);
    const nehd::Tensor proj = testutil::random_tensor(out.values.shape(), rng);
    const nehd::EdgeGrads grads = nehd::edge_block_backward(plane, p, out, proj);

    auto loss = [&]() { return testutil::dot(nehd::edge_block_forward(plane, p).values, proj); };
    double worst = testutil::fd_check(plane, grads.input, loss);
    worst = std::max(worst, testutil::fd_check(p.edge_filters.weights, grads.edge_weights, loss));
    worst = std::max(worst, testutil::fd_check(p.noedge_conv.weights, grads.noedge_weights, loss));
    worst = std::max(worst, testutil::fd_check(p.noedge_conv.bias, grads.noedge_bias, loss));
    return worst;
}

double hist_fd_worst(std::uint64_t seed, int shape_idx) {
    auto rng = nehd::make_rng(nehd::mix_seed(seed, "accept_hist"));
    struct Case {
        std::size_t bins, channels, rows, cols, s, t;
    };
    const Case cases[3] = {{3, 2, 4, 4, 2, 2}, {2, 3, 6, 4, 3, 2}, {4, 1, 4, 6, 2, 3}};
    const Case& c = cases[shape_idx];

    nehd::HistogramParams p = nehd::init_histogram(c.bins, c.channels,
                                                   nehd::HistogramInit::kUniformRange, -1.0, 1.0,
                                                   seed, c.s, c.t);
    for (std::size_t i = 0; i < p.mix.size(); ++i) p.mix[i] += nehd::uniform(rng, -0.3, 0.3);
    for (std::size_t i = 0; i < p.centers.size(); ++i) {
        p.centers[i] += nehd::uniform(rng, -0.2, 0.2);
    }
    for (std::size_t i = 0; i < p.widths.size(); ++i) p.widths[i] += nehd::uniform(rng, -0.2, 0.2);

    nehd::Tensor f = testutil::random_tensor({c.channels, c.rows, c.cols}, rng);
    const nehd::HistogramForward cache = nehd::histogram_forward_cached(f, p);
    const nehd::Tensor proj = testutil::random_tensor(cache.pooled.shape(), rng);
    const nehd::HistogramGrads grads = nehd::histogram_backward(f, p, cache, proj);

    auto loss = [&]() { return testutil::dot(nehd::histogram_forward(f, p), proj); };
    double worst = testutil::fd_check(f, grads.input, loss);
    worst = std::max(worst, testutil::fd_check(p.mix, grads.mix, loss));
    worst = std::max(worst, testutil::fd_check(p.centers, grads.centers, loss));
    worst = std::max(worst, testutil::fd_check(p.widths, grads.widths, loss));
    return worst;
}

double classifier_fd_worst(std::uint64_t seed, int shape_idx) {
    auto rng = nehd::make_rng(nehd::mix_seed(seed, "accept_cls"));
    struct Case {
        std::size_t rows, cols, b, bins, s, t;
    };
    const Case cases[3] = {{8, 4, 4, 3, 2, 2}, {6, 6, 2, 2, 3, 3}, {12, 4, 4, 4, 4, 2}};
    const Case& c = cases[shape_idx];

    nehd::ModelConfig mc;
    mc.kind = nehd::VariantKind::kNehd;
    mc.freq_bins = c.rows;
    mc.frames = c.cols;
    mc.edge_filters = c.b;
    mc.bins = c.bins;
    mc.pool_rows = c.s;
    mc.pool_cols = c.t;
    mc.edge_init = nehd::EdgeInit::kRandom;
    nehd::Model m = nehd::build_model(mc, seed);

    const nehd::Tensor plane = testutil::random_tensor({c.rows, c.cols}, rng);
    const nehd::Tensor proj = testutil::random_tensor({mc.classes}, rng);

    nehd::ModelGrads grads = nehd::zero_grads(m);
    const nehd::SampleCache cache = nehd::forward_one(m, plane);
    nehd::backward_one(m, plane, cache, proj.data(), grads);

    auto loss = [&]() { return testutil::dot(nehd::forward_one(m, plane).logits, proj); };
    double worst = testutil::fd_check(m.classifier_w, grads.classifier_w, loss);
    worst = std::max(worst, testutil::fd_check(m.classifier_b, grads.classifier_b, loss));
    return worst;
}

Outcome criterion_2(Shared&) {
    const double t0 = now_seconds();
    double conv = 0.0, edge = 0.0, hist = 0.0, cls = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (int shape = 0; shape < 3; ++shape) {
            conv = std::max(conv, conv_fd_worst(seed, shape));
            edge = std::max(edge, edge_fd_worst(seed, shape));
            hist = std::max(hist, hist_fd_worst(seed, shape));
            cls = std::max(cls, classifier_fd_worst(seed, shape));
        }
    }
    const double elapsed = now_seconds() - t0;
    const double worst = std::max({conv, edge, hist, cls});

    Outcome o;
    o.pass = worst < 1e-5 && elapsed < 30.0;
    std::ostringstream d;
    d << "20 seeds x 3 shapes; worst rel err conv=" << conv << " edge=" << edge
      << " hist=" << hist << " classifier=" << cls << " (limit 1e-5) in " << fmt(elapsed)
      << " s (limit 30 s)";
    o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------------------
// criterion 3: convolution oracle
// ---------------------------------------------------------------------------

Outcome criterion_3(Shared&) {
    auto rng = nehd::make_rng(nehd::mix_seed(0, "accept_oracle"));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t cin = 1 + rng() % 3;
        const std::size_t k = (rng() % 2) ? 1 : 3;
        const nehd::Padding pad = (rng() % 2) ? nehd::Padding::kSameZero : nehd::Padding::kValid;
        std::size_t rows = 1 + rng() % 6;
        std::size_t cols = 1 + rng() % 6;
        if (pad == nehd::Padding::kValid) {
            rows = std::max(rows, k);
            cols = std::max(cols, k);
        }
        const std::size_t filters = 1 + rng() % 4;

        nehd::FilterBank fb;
        fb.weights = testutil::random_tensor({filters, cin, k, k}, rng);
        if (rng() % 2) fb.bias = testutil::random_tensor({filters}, rng);
        fb.padding = pad;
        const nehd::Tensor x = testutil::random_tensor({cin, rows, cols}, rng);

        const nehd::Tensor got = nehd::conv2d_forward(x, fb);
        const nehd::Tensor want = nehd::reference::conv2d_forward(x, fb);
        worst = std::max(worst, testutil::max_abs_diff(got, want));
    }
    Outcome o;
    o.pass = worst <= 1e-12;
    std::ostringstream d;
    d << "100 random cases vs the nested-loop reference, worst |diff| = " << worst
      << " (limit 1e-12)";
    o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------------------
// criterion 4: histogram invariants
// ---------------------------------------------------------------------------

Outcome criterion_4(Shared&) {
    std::string failure;

    // (0,1] range on random inputs and perturbed parameters
    {
        auto rng = nehd::make_rng(4);
        nehd::HistogramParams p =
            nehd::init_histogram(4, 3, nehd::HistogramInit::kRandom, -1.0, 1.0, 4, 2, 2);
        const nehd::Tensor f = testutil::random_tensor({3, 6, 6}, rng, -2.0, 2.0);
        const nehd::HistogramForward fw = nehd::histogram_forward_cached(f, p);
        for (std::size_t i = 0; i < fw.rbf.size(); ++i) {
            if (!(fw.rbf[i] > 0.0 && fw.rbf[i] <= 1.0)) failure = "rbf value outside (0,1]";
        }
        for (std::size_t i = 0; i < fw.pooled.size(); ++i) {
            if (!(fw.pooled[i] > 0.0 && fw.pooled[i] <= 1.0)) failure = "pooled value outside (0,1]";
        }
    }

    // input equal to the bin center gives exactly 1
    if (failure.empty()) {
        nehd::HistogramParams p =
            nehd::init_histogram(2, 2, nehd::HistogramInit::kUniformRange, 0.0, 1.0, 0, 2, 2);
        p.centers[0] = 0.7;
        p.centers[1] = 0.7;
        nehd::Tensor f({2, 4, 4});
        f.fill(0.7);  // mix rows average the channels: u = 0.7 - 0.7 = 0
        const nehd::Tensor out = nehd::histogram_forward(f, p);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] != 1.0) failure = "input == center did not give exactly 1";
        }
    }

    // zero width gives exactly 1 regardless of input
    if (failure.empty()) {
        auto rng = nehd::make_rng(44);
        nehd::HistogramParams p =
            nehd::init_histogram(3, 1, nehd::HistogramInit::kUniformRange, -1.0, 1.0, 0, 2, 2);
        p.widths.fill(0.0);
        const nehd::Tensor f = testutil::random_tensor({1, 4, 4}, rng, -5.0, 5.0);
        const nehd::Tensor out = nehd::histogram_forward(f, p);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] != 1.0) failure = "zero width did not give exactly 1";
        }
    }

    // S = T = 1 reduces to the raw RBF map
    if (failure.empty()) {
        auto rng = nehd::make_rng(45);
        nehd::HistogramParams p =
            nehd::init_histogram(3, 2, nehd::HistogramInit::kRandom, -1.0, 1.0, 7, 1, 1);
        const nehd::Tensor f = testutil::random_tensor({2, 5, 4}, rng);
        const nehd::HistogramForward fw = nehd::histogram_forward_cached(f, p);
        if (testutil::max_abs_diff(fw.pooled, fw.rbf) != 0.0) {
            failure = "1x1 pooling is not the identity";
        }
    }

    // global pooling equals the plane mean (brute force)
    if (failure.empty()) {
        auto rng = nehd::make_rng(46);
        const std::size_t rows = 6, cols = 4;
        nehd::HistogramParams p = nehd::init_histogram(
            2, 2, nehd::HistogramInit::kRandom, -1.0, 1.0, 9, rows, cols);
        const nehd::Tensor f = testutil::random_tensor({2, rows, cols}, rng);
        const nehd::HistogramForward fw = nehd::histogram_forward_cached(f, p);
        for (std::size_t b = 0; b < 2 && failure.empty(); ++b) {
            double sum = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) sum += fw.rbf(b, r, c);
            }
            const double mean = sum / static_cast<double>(rows * cols);
            if (std::abs(fw.pooled(b, 0, 0) - mean) > 1e-12) {
                failure = "global pooling disagrees with the plane mean";
            }
        }
    }

    Outcome o;
    o.pass = failure.empty();
    o.detail = o.pass
                   ? "range (0,1], input==center -> 1, zero width -> 1, 1x1 pool identity, "
                     "global pool == mean"
                   : failure;
    return o;
}

// ---------------------------------------------------------------------------
// criterion 5: end-to-end learning
// ---------------------------------------------------------------------------

Outcome criterion_5(Shared& shared) {
    const double t0 = now_seconds();
    const std::vector<double>& accs = shared.test_accuracies(nehd::VariantKind::kNehd);
    const double elapsed = now_seconds() - t0;
    const double mean = mean_of(accs);

    Outcome o;
    o.pass = mean >= 0.90 && elapsed < 600.0;
    o.detail = "mean test accuracy " + fmt(mean) + " over 3 seeds (" + join_accs(accs) +
               "), 50-epoch protocol, in " + fmt(elapsed, 1) + " s (limit 600 s)";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 6: ablation ordering
// ---------------------------------------------------------------------------

Outcome criterion_6(Shared& shared) {
    const double nehd = mean_of(shared.test_accuracies(nehd::VariantKind::kNehd));
    const double hist = mean_of(shared.test_accuracies(nehd::VariantKind::kHistogramOnly));
    const double edge = mean_of(shared.test_accuracies(nehd::VariantKind::kEdgeOnly));
    const double linear = mean_of(shared.test_accuracies(nehd::VariantKind::kLinearBaseline));

    Outcome o;
    o.pass = nehd >= hist && hist > linear && nehd >= edge;
    o.detail = "mean test accuracy over 3 seeds: nehd=" + fmt(nehd) +
               " histogram_only=" + fmt(hist) + " edge_only=" + fmt(edge) +
               " linear_baseline=" + fmt(linear) +
               "; need nehd >= histogram_only > linear_baseline and nehd >= edge_only";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 7: overfit sanity
// ---------------------------------------------------------------------------

Outcome criterion_7(Shared& shared) {
    const nehd::LoadedDataset& d = shared.dataset();

    // 32 fixed samples: the first eight of each class, in split order
    std::vector<const nehd::LabeledPlane*> batch;
    std::map<int, int> taken;
    for (const auto& s : d.train) {
        if (taken[s.label] < 8) {
            batch.push_back(&s);
            taken[s.label] += 1;
        }
    }
    if (batch.size() != 32) {
        return {false, "could not assemble 32 fixed samples from the training split"};
    }

    nehd::ModelConfig mc;  // default nehd geometry
    nehd::Model m = nehd::build_model(mc, 0);
    nehd::AdamConfig ac;
    ac.learning_rate = 0.01;  // overfit check: convergence speed, not protocol
    nehd::Adam adam(ac);

    const std::size_t classes = mc.classes;
    int steps_used = -1;
    double reached = 0.0;
    for (int step = 0; step <= 200; ++step) {
        std::vector<nehd::SampleCache> caches;
        caches.reserve(batch.size());
        double loss = 0.0;
        for (const auto* s : batch) {
            caches.push_back(nehd::forward_one(m, s->values));
            loss += nehd::cross_entropy_row(caches.back().logits.data(), classes, s->label).loss;
        }
        loss /= static_cast<double>(batch.size());
        reached = loss;
        if (loss < 0.05) {
            steps_used = step;
            break;
        }
        if (step == 200) break;

        nehd::ModelGrads grads = nehd::zero_grads(m);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            nehd::RowLoss row = nehd::cross_entropy_row(caches[i].logits.data(), classes,
                                                        batch[i]->label);
            for (double& g : row.grad) g /= static_cast<double>(batch.size());
            nehd::backward_one(m, batch[i]->values, caches[i], row.grad.data(), grads);
        }
        adam.step(m.parameters(), grads.aligned(m));
    }

    Outcome o;
    o.pass = steps_used >= 0;
    o.detail = o.pass ? "32 fixed samples, training loss " + fmt(reached, 4) + " after " +
                            std::to_string(steps_used) + " full-batch steps (limit 200)"
                      : "loss still " + fmt(reached, 4) + " after 200 steps (need < 0.05)";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 8: parameter accounting
// ---------------------------------------------------------------------------

Outcome criterion_8(Shared&) {
    nehd::ModelConfig linear;
    linear.kind = nehd::VariantKind::kLinearBaseline;  // 192 x 12 input, 4 classes
    nehd::Model lm = nehd::build_model(linear, 0);
    const std::size_t linear_total = nehd::total_parameters(lm);

    // documented tiny config: B = 4 edge filters, 4 bins, 4x2 pooling
    nehd::ModelConfig tiny;
    tiny.edge_filters = 4;
    tiny.bins = 4;
    nehd::Model tm = nehd::build_model(tiny, 0);
    const std::size_t tiny_total = nehd::total_parameters(tm);
    // 4*9 edge + (4+1) no-edge + (4*5+4+4) histogram + 4*(4*48*6)+4 classifier
    const std::size_t tiny_want = 36 + 5 + 28 + 4612;  // = 4681

    nehd::ModelConfig full;  // default nehd
    nehd::Model fm = nehd::build_model(full, 0);
    const std::size_t full_total = nehd::total_parameters(fm);

    Outcome o;
    o.pass = linear_total == 9220 && tiny_total == tiny_want && full_total >= 5000 &&
             full_total <= 30000;
    o.detail = "linear 192x12 -> " + std::to_string(linear_total) +
               " (want 9220); tiny nehd (B=4, 4 bins) -> " + std::to_string(tiny_total) +
               " (want " + std::to_string(tiny_want) + "); default nehd -> " +
               std::to_string(full_total) + " (want within [5000, 30000])";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 9: CLI determinism
// ---------------------------------------------------------------------------

fs::path locate_cli() {
    if (const char* env = std::getenv("NEHD_CLI_BIN")) {
        if (fs::exists(env)) return env;
    }
    char buf[4096];
    const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n > 0) {
        buf[n] = '\0';
        const fs::path sibling = fs::path(buf).parent_path() / "nehd";
        if (fs::exists(sibling)) return sibling;
    }
    return {};
}

bool run_cli(const fs::path& cli, const std::string& args) {
    const std::string cmd = "\"" + cli.string() + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

// Every regular file under `a` must exist under `b` with identical bytes,
// and the two trees must hold the same number of files.
std::string compare_trees(const fs::path& a, const fs::path& b) {
    std::size_t count_a = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        count_a += 1;
        const fs::path rel = fs::relative(entry.path(), a);
        const fs::path other = b / rel;
        if (!fs::exists(other)) return rel.string() + " missing from the second run";
        if (testutil::read_bytes(entry.path()) != testutil::read_bytes(other)) {
            return rel.string() + " differs between runs";
        }
    }
    std::size_t count_b = 0;
    for (const auto& entry : fs::recursive_directory_iterator(b)) {
        if (entry.is_regular_file()) count_b += 1;
    }
    if (count_a != count_b) return "the runs wrote different file sets";
    return "";
}

Outcome criterion_9(Shared& shared) {
    const fs::path cli = locate_cli();
    if (cli.empty()) {
        return {false, "CLI binary not found (set NEHD_CLI_BIN or build the nehd target)"};
    }
    const fs::path manifest = shared.corpus_dir / "manifest.jsonl";
    shared.corpus();  // make sure it exists

    testutil::TempDir tmp("accept9");
    const fs::path t1 = tmp.path / "train1";
    const fs::path t2 = tmp.path / "train2";
    const std::string train_args = "train --manifest \"" + manifest.string() +
                                   "\" --epochs 2 --seed 3 --jobs 1 --out \"";
    if (!run_cli(cli, train_args + t1.string() + "\"") ||
        !run_cli(cli, train_args + t2.string() + "\"")) {
        return {false, "CLI train run failed"};
    }
    std::string diff = compare_trees(t1, t2);
    if (!diff.empty()) return {false, "train outputs: " + diff};

    const fs::path e1 = tmp.path / "eval1";
    const fs::path e2 = tmp.path / "eval2";
    const std::string eval_args = "evaluate --checkpoint \"" + (t1 / "checkpoint.bin").string() +
                                  "\" --manifest \"" + manifest.string() +
                                  "\" --split test --jobs 1 --out \"";
    if (!run_cli(cli, eval_args + e1.string() + "\"") ||
        !run_cli(cli, eval_args + e2.string() + "\"")) {
        return {false, "CLI evaluate run failed"};
    }
    diff = compare_trees(e1, e2);
    if (!diff.empty()) return {false, "evaluate outputs: " + diff};

    Outcome o;
    o.pass = true;
    o.detail = "repeated sequential train and evaluate runs wrote byte-identical "
               "history, checkpoint, and report files";
    return o;
}

// ---------------------------------------------------------------------------
// criterion 10: full-dataset reproduction (documented, not gated)
// ---------------------------------------------------------------------------

Outcome criterion_10(Shared&) {
    Outcome o;
    o.pass = true;
    o.detail = "documented only: on the four-class DeepShip corpus with the documented "
               "config, expected test accuracy is about 65.80 +/- 0.41; outside "
               "desk-scale CI by design, so this line never gates";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    Shared shared;
    std::vector<int> selected;

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected.push_back(std::atoi(argv[++i]));
        } else if (arg.rfind("--criterion=", 0) == 0) {
            selected.push_back(std::atoi(arg.c_str() + 12));
        } else if (arg == "--corpus-dir" && i + 1 < argc) {
            shared.corpus_dir = argv[++i];
        } else if (arg == "--help" || arg == "-h") {
            std::printf("usage: nehd_acceptance [--criterion N]... [--corpus-dir PATH]\n");
            return 0;
        } else {
            std::fprintf(stderr, "error: unknown argument %s\n", arg.c_str());
            return 2;
        }
    }
    if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (int n : selected) {
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "error: criterion %d out of range 1..10\n", n);
            return 2;
        }
    }

    static const char* kNames[10] = {
        "STFT geometry",      "gradient suite",    "convolution oracle",
        "histogram invariants", "end-to-end learning", "ablation ordering",
        "overfit sanity",     "parameter accounting", "CLI determinism",
        "full-dataset reproduction",
    };
    using Fn = Outcome (*)(Shared&);
    static const Fn kChecks[10] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                   criterion_5, criterion_6, criterion_7, criterion_8,
                                   criterion_9, criterion_10};

    int failures = 0;
    for (int n : selected) {
        Outcome o;
        try {
            o = kChecks[n - 1](shared);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) failures += 1;
        std::printf("[%s] criterion %2d: %s — %s\n", o.pass ? "PASS" : "FAIL", n, kNames[n - 1],
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %zu/%zu criteria passed\n",
                selected.size() - static_cast<std::size_t>(failures), selected.size());
    return failures == 0 ? 0 : 1;
}
