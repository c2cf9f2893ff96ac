#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nehd/edge_block.hpp"
#include "nehd/histogram_layer.hpp"
#include "nehd/tensor.hpp"

namespace nehd {

enum class VariantKind { kLinearBaseline, kEdgeOnly, kHistogramOnly, kNehd };

const char* variant_name(VariantKind k);
/// Accepts the canonical names plus the short aliases linear, edge,
/// histogram, nehd.
VariantKind variant_from_name(const std::string& name);

struct ModelConfig {
    VariantKind kind = VariantKind::kNehd;
    std::size_t freq_bins = 192;  // input plane rows
    std::size_t frames = 12;      // input plane cols
    std::size_t classes = 4;
    std::size_t edge_filters = 8;  // B
    std::size_t bins = 8;          // histogram bins
    std::size_t pool_rows = 4;     // S (frequency)
    std::size_t pool_cols = 2;     // T (time)
    EdgeInit edge_init = EdgeInit::kSobel;
    HistogramInit hist_init = HistogramInit::kUniformRange;
    double hist_lo = -3.0;
    double hist_hi = 3.0;
};

/// All four ablation variants share one affine classifier over flattened
/// features; they differ only in the feature path:
///   linear_baseline  flatten(plane)
///   edge_only        flatten(avg_pool(edge_block(plane)))
///   histogram_only   flatten(histogram(plane as one channel))
///   nehd             flatten(histogram(edge_block(plane)))
struct Model {
    ModelConfig config;
    EdgeParams edge;        // edge_only, nehd
    HistogramParams hist;   // histogram_only, nehd
    Tensor classifier_w;    // [classes x features]
    Tensor classifier_b;    // [classes]

    std::size_t feature_count() const;
    bool uses_edge() const;
    bool uses_histogram() const;

    /// Learnable tensors in a fixed documented order; the same order is used
    /// by gradients, the optimizer, and the checkpoint container.
    std::vector<NamedTensor> parameters();
};

/// Deterministic for a fixed seed: classifier Glorot-uniform with zero bias,
/// edge and histogram layers through their own init rules.
Model build_model(const ModelConfig& cfg, std::uint64_t seed);

struct ParamCount {
    std::string name;
    std::size_t count = 0;
};

std::vector<ParamCount> count_parameters(const Model& m);
std::size_t total_parameters(const Model& m);

struct SampleCache {
    FeatureMaps edge_out;
    Tensor edge_pooled;    // edge_only
    Tensor hist_input;     // histogram_only: plane as one channel
    HistogramForward hist;
    Tensor features;       // rank 1
    Tensor logits;         // rank 1 [classes]
};

/// plane is one normalized [freq_bins x frames] spectrogram. Throws a
/// diagnostic naming the layer if an activation goes non-finite.
SampleCache forward_one(const Model& m, const Tensor& plane);

/// Batch convenience for evaluation: logits [batch x classes], order kept.
Tensor forward(const Model& m, const std::vector<Tensor>& planes);

/// Gradient tensors mirroring Model::parameters(); fields not used by the
/// variant stay empty.
struct ModelGrads {
    Tensor edge_weights;
    Tensor noedge_weights;
    Tensor noedge_bias;
    Tensor hist_mix;
    Tensor hist_centers;
    Tensor hist_widths;
    Tensor classifier_w;
    Tensor classifier_b;

    void accumulate(const ModelGrads& other);
    /// Pointers aligned with Model::parameters() order.
    std::vector<const Tensor*> aligned(const Model& m) const;
};

ModelGrads zero_grads(const Model& m);

/// Accumulates one sample's gradients (upstream = d loss/d logits for this
/// sample) into grads.
void backward_one(const Model& m, const Tensor& plane, const SampleCache& cache,
                  const double* grad_logits, ModelGrads& grads);

/// nehd variant only: channel 0 = the input plane, channels 1..bins = the
/// histogram maps nearest-upsampled to the plane grid.
Tensor export_features(const Model& m, const Tensor& plane);

}  // namespace nehd
