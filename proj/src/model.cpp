#include "nehd/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nehd/pooling.hpp"
#include "nehd/rng.hpp"

namespace nehd {

const char* variant_name(VariantKind k) {
    switch (k) {
        case VariantKind::kLinearBaseline: return "linear_baseline";
        case VariantKind::kEdgeOnly: return "edge_only";
        case VariantKind::kHistogramOnly: return "histogram_only";
        case VariantKind::kNehd: return "nehd";
    }
    return "unknown";
}

VariantKind variant_from_name(const std::string& name) {
    if (name == "linear_baseline" || name == "linear") return VariantKind::kLinearBaseline;
    if (name == "edge_only" || name == "edge") return VariantKind::kEdgeOnly;
    if (name == "histogram_only" || name == "histogram") return VariantKind::kHistogramOnly;
    if (name == "nehd") return VariantKind::kNehd;
    throw std::invalid_argument("unknown model variant '" + name + "'");
}

bool Model::uses_edge() const {
    return config.kind == VariantKind::kEdgeOnly || config.kind == VariantKind::kNehd;
}

bool Model::uses_histogram() const {
    return config.kind == VariantKind::kHistogramOnly || config.kind == VariantKind::kNehd;
}

std::size_t Model::feature_count() const {
    const std::size_t pooled_rows = config.freq_bins / config.pool_rows;
    const std::size_t pooled_cols = config.frames / config.pool_cols;
    switch (config.kind) {
        case VariantKind::kLinearBaseline: return config.freq_bins * config.frames;
        case VariantKind::kEdgeOnly: return (config.edge_filters + 1) * pooled_rows * pooled_cols;
        case VariantKind::kHistogramOnly:
        case VariantKind::kNehd: return config.bins * pooled_rows * pooled_cols;
    }
    return 0;
}

std::vector<NamedTensor> Model::parameters() {
    std::vector<NamedTensor> params;
    if (uses_edge()) {
        params.push_back({"edge.weights", &edge.edge_filters.weights});
        params.push_back({"noedge.weights", &edge.noedge_conv.weights});
        params.push_back({"noedge.bias", &edge.noedge_conv.bias});
    }
    if (uses_histogram()) {
        params.push_back({"histogram.mix", &hist.mix});
        params.push_back({"histogram.centers", &hist.centers});
        params.push_back({"histogram.widths", &hist.widths});
    }
    params.push_back({"classifier.weights", &classifier_w});
    params.push_back({"classifier.bias", &classifier_b});
    return params;
}

namespace {

void validate(const ModelConfig& cfg) {
    if (cfg.freq_bins == 0 || cfg.frames == 0) {
        throw std::invalid_argument("model config: input plane dims must be positive");
    }
    if (cfg.classes < 2) throw std::invalid_argument("model config: needs at least 2 classes");
    if (cfg.kind != VariantKind::kLinearBaseline) {
        if (cfg.pool_rows == 0 || cfg.pool_rows > cfg.freq_bins || cfg.pool_cols == 0 ||
            cfg.pool_cols > cfg.frames) {
            std::ostringstream os;
            os << "model config: pool window " << cfg.pool_rows << "x" << cfg.pool_cols
               << " does not fit the " << cfg.freq_bins << "x" << cfg.frames << " plane";
            throw std::invalid_argument(os.str());
        }
    }
    if ((cfg.kind == VariantKind::kEdgeOnly || cfg.kind == VariantKind::kNehd) &&
        cfg.edge_filters == 0) {
        throw std::invalid_argument("model config: edge variants need edge_filters >= 1");
    }
    if ((cfg.kind == VariantKind::kHistogramOnly || cfg.kind == VariantKind::kNehd) &&
        cfg.bins == 0) {
        throw std::invalid_argument("model config: histogram variants need bins >= 1");
    }
}

void check_finite(const Tensor& t, const char* layer) {
    if (!t.all_finite()) {
        throw std::runtime_error(std::string("non-finite activation in layer '") + layer + "'");
    }
}

void check_plane(const Model& m, const Tensor& plane) {
    if (plane.rank() != 2 || plane.dim(0) != m.config.freq_bins ||
        plane.dim(1) != m.config.frames) {
        std::ostringstream os;
        os << "model forward: input " << plane.shape_str() << " does not match the configured ["
           << m.config.freq_bins << " x " << m.config.frames << "] plane";
        throw std::invalid_argument(os.str());
    }
}

Tensor as_one_channel(const Tensor& plane) {
    Tensor x({1, plane.dim(0), plane.dim(1)});
    for (std::size_t i = 0; i < plane.size(); ++i) x[i] = plane[i];
    return x;
}

}  // namespace

Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    Model m;
    m.config = cfg;
    if (cfg.kind == VariantKind::kEdgeOnly || cfg.kind == VariantKind::kNehd) {
        m.edge = init_edge_filters(cfg.edge_init, cfg.edge_filters, mix_seed(seed, "edge"));
    }
    if (cfg.kind == VariantKind::kHistogramOnly || cfg.kind == VariantKind::kNehd) {
        const std::size_t channels =
            cfg.kind == VariantKind::kHistogramOnly ? 1 : cfg.edge_filters + 1;
        m.hist = init_histogram(cfg.bins, channels, cfg.hist_init, cfg.hist_lo, cfg.hist_hi,
                                mix_seed(seed, "histogram"), cfg.pool_rows, cfg.pool_cols);
    }

    const std::size_t features = m.feature_count();
    m.classifier_w = Tensor({cfg.classes, features});
    m.classifier_b = Tensor({cfg.classes}, 0.0);
    const double limit = std::sqrt(6.0 / static_cast<double>(features + cfg.classes));
    auto rng = make_rng(mix_seed(seed, "classifier"));
    for (std::size_t i = 0; i < m.classifier_w.size(); ++i) {
        m.classifier_w[i] = uniform(rng, -limit, limit);
    }
    return m;
}

std::vector<ParamCount> count_parameters(const Model& m) {
    std::vector<ParamCount> counts;
    if (m.uses_edge()) {
        counts.push_back({"edge.weights", m.edge.edge_filters.weights.size()});
        counts.push_back({"noedge.weights", m.edge.noedge_conv.weights.size()});
        counts.push_back({"noedge.bias", m.edge.noedge_conv.bias.size()});
    }
    if (m.uses_histogram()) {
        counts.push_back({"histogram.mix", m.hist.mix.size()});
        counts.push_back({"histogram.centers", m.hist.centers.size()});
        counts.push_back({"histogram.widths", m.hist.widths.size()});
    }
    counts.push_back({"classifier.weights", m.classifier_w.size()});
    counts.push_back({"classifier.bias", m.classifier_b.size()});
    return counts;
}

std::size_t total_parameters(const Model& m) {
    std::size_t total = 0;
    for (const auto& pc : count_parameters(m)) total += pc.count;
    return total;
}

SampleCache forward_one(const Model& m, const Tensor& plane) {
    check_plane(m, plane);
    check_finite(plane, "input");
    SampleCache cache;

    const Tensor* hist_src = nullptr;
    if (m.uses_edge()) {
        cache.edge_out = edge_block_forward(plane, m.edge);
        check_finite(cache.edge_out.values, "edge_block");
        hist_src = &cache.edge_out.values;
    }

    if (m.config.kind == VariantKind::kHistogramOnly) {
        cache.hist_input = as_one_channel(plane);
        hist_src = &cache.hist_input;
    }

    if (m.uses_histogram()) {
        cache.hist = histogram_forward_cached(*hist_src, m.hist);
        check_finite(cache.hist.pooled, "histogram");
    } else if (m.config.kind == VariantKind::kEdgeOnly) {
        cache.edge_pooled =
            avg_pool_forward(cache.edge_out.values, m.config.pool_rows, m.config.pool_cols);
        check_finite(cache.edge_pooled, "pooling");
    }

    const Tensor* flat_src = nullptr;
    switch (m.config.kind) {
        case VariantKind::kLinearBaseline: flat_src = &plane; break;
        case VariantKind::kEdgeOnly: flat_src = &cache.edge_pooled; break;
        case VariantKind::kHistogramOnly:
        case VariantKind::kNehd: flat_src = &cache.hist.pooled; break;
    }
    cache.features = Tensor({m.feature_count()});
    if (flat_src->size() != cache.features.size()) {
        throw std::runtime_error("model forward: feature size mismatch (got " +
                                 std::to_string(flat_src->size()) + ", expected " +
                                 std::to_string(cache.features.size()) + ")");
    }
    for (std::size_t i = 0; i < cache.features.size(); ++i) cache.features[i] = (*flat_src)[i];

    cache.logits = Tensor({m.config.classes});
    for (std::size_t c = 0; c < m.config.classes; ++c) {
        double acc = m.classifier_b[c];
        const double* w = m.classifier_w.data() + c * cache.features.size();
        for (std::size_t i = 0; i < cache.features.size(); ++i) acc += w[i] * cache.features[i];
        cache.logits[c] = acc;
    }
    check_finite(cache.logits, "classifier");
    return cache;
}

Tensor forward(const Model& m, const std::vector<Tensor>& planes) {
    if (planes.empty()) throw std::invalid_argument("model forward: empty batch");
    Tensor logits({planes.size(), m.config.classes});
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const SampleCache cache = forward_one(m, planes[i]);
        for (std::size_t c = 0; c < m.config.classes; ++c) logits(i, c) = cache.logits[c];
    }
    return logits;
}

ModelGrads zero_grads(const Model& m) {
    ModelGrads g;
    if (m.uses_edge()) {
        g.edge_weights = Tensor::zeros_like(m.edge.edge_filters.weights);
        g.noedge_weights = Tensor::zeros_like(m.edge.noedge_conv.weights);
        g.noedge_bias = Tensor::zeros_like(m.edge.noedge_conv.bias);
    }
    if (m.uses_histogram()) {
        g.hist_mix = Tensor::zeros_like(m.hist.mix);
        g.hist_centers = Tensor::zeros_like(m.hist.centers);
        g.hist_widths = Tensor::zeros_like(m.hist.widths);
    }
    g.classifier_w = Tensor::zeros_like(m.classifier_w);
    g.classifier_b = Tensor::zeros_like(m.classifier_b);
    return g;
}

namespace {

void add_into(Tensor& dst, const Tensor& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

void ModelGrads::accumulate(const ModelGrads& other) {
    if (!edge_weights.empty()) {
        add_into(edge_weights, other.edge_weights);
        add_into(noedge_weights, other.noedge_weights);
        add_into(noedge_bias, other.noedge_bias);
    }
    if (!hist_mix.empty()) {
        add_into(hist_mix, other.hist_mix);
        add_into(hist_centers, other.hist_centers);
        add_into(hist_widths, other.hist_widths);
    }
    add_into(classifier_w, other.classifier_w);
    add_into(classifier_b, other.classifier_b);
}

std::vector<const Tensor*> ModelGrads::aligned(const Model& m) const {
    std::vector<const Tensor*> out;
    if (m.uses_edge()) {
        out.push_back(&edge_weights);
        out.push_back(&noedge_weights);
        out.push_back(&noedge_bias);
    }
    if (m.uses_histogram()) {
        out.push_back(&hist_mix);
        out.push_back(&hist_centers);
        out.push_back(&hist_widths);
    }
    out.push_back(&classifier_w);
    out.push_back(&classifier_b);
    return out;
}

void backward_one(const Model& m, const Tensor& plane, const SampleCache& cache,
                  const double* grad_logits, ModelGrads& grads) {
    const std::size_t features = cache.features.size();

    // Classifier: logits = W f + b.
    Tensor grad_features({features});
    for (std::size_t c = 0; c < m.config.classes; ++c) {
        const double g = grad_logits[c];
        grads.classifier_b[c] += g;
        double* gw = grads.classifier_w.data() + c * features;
        const double* w = m.classifier_w.data() + c * features;
        for (std::size_t i = 0; i < features; ++i) {
            gw[i] += g * cache.features[i];
            grad_features[i] += g * w[i];
        }
    }

    if (m.config.kind == VariantKind::kLinearBaseline) return;

    const std::size_t pooled_rows = m.config.freq_bins / m.config.pool_rows;
    const std::size_t pooled_cols = m.config.frames / m.config.pool_cols;

    if (m.config.kind == VariantKind::kEdgeOnly) {
        Tensor g_pooled({m.config.edge_filters + 1, pooled_rows, pooled_cols});
        for (std::size_t i = 0; i < g_pooled.size(); ++i) g_pooled[i] = grad_features[i];
        const Tensor g_edge_maps = avg_pool_backward(
            cache.edge_out.values.shape(), m.config.pool_rows, m.config.pool_cols, g_pooled);
        const EdgeGrads eg = edge_block_backward(plane, m.edge, cache.edge_out, g_edge_maps);
        add_into(grads.edge_weights, eg.edge_weights);
        add_into(grads.noedge_weights, eg.noedge_weights);
        add_into(grads.noedge_bias, eg.noedge_bias);
        return;
    }

    // Histogram variants.
    Tensor g_pooled({m.config.bins, pooled_rows, pooled_cols});
    for (std::size_t i = 0; i < g_pooled.size(); ++i) g_pooled[i] = grad_features[i];
    const Tensor& hist_in =
        m.config.kind == VariantKind::kNehd ? cache.edge_out.values : cache.hist_input;
    const HistogramGrads hg = histogram_backward(hist_in, m.hist, cache.hist, g_pooled);
    add_into(grads.hist_mix, hg.mix);
    add_into(grads.hist_centers, hg.centers);
    add_into(grads.hist_widths, hg.widths);

    if (m.config.kind == VariantKind::kNehd) {
        const EdgeGrads eg = edge_block_backward(plane, m.edge, cache.edge_out, hg.input);
        add_into(grads.edge_weights, eg.edge_weights);
        add_into(grads.noedge_weights, eg.noedge_weights);
        add_into(grads.noedge_bias, eg.noedge_bias);
    }
}

Tensor export_features(const Model& m, const Tensor& plane) {
    if (m.config.kind != VariantKind::kNehd) {
        throw std::invalid_argument(std::string("export_features: needs the nehd variant, got ") +
                                    variant_name(m.config.kind));
    }
    check_plane(m, plane);
    const SampleCache cache = forward_one(m, plane);
    const Tensor& pooled = cache.hist.pooled;
    const std::size_t rows = m.config.freq_bins;
    const std::size_t cols = m.config.frames;

    Tensor out({1 + m.config.bins, rows, cols});
    for (std::size_t i = 0; i < plane.size(); ++i) out[i] = plane[i];
    for (std::size_t b = 0; b < m.config.bins; ++b) {
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t pr = std::min(r / m.config.pool_rows, pooled.dim(1) - 1);
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t pc = std::min(c / m.config.pool_cols, pooled.dim(2) - 1);
                out(b + 1, r, c) = pooled(b, pr, pc);
            }
        }
    }
    return out;
}

}  // namespace nehd
