#include "nehd/edge_block.hpp"

#include <cmath>
#include <stdexcept>

#include "nehd/rng.hpp"

namespace nehd {

namespace {

// 0-degree Sobel (horizontal gradient); the other orientations rotate the
// outer ring of coefficients by 45-degree steps.
constexpr double kSobel[4][3][3] = {
    {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}},     // 0
    {{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}},     // 45
    {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}},     // 90
    {{0, -1, -2}, {1, 0, -1}, {2, 1, 0}},     // 135
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

const char* edge_init_name(EdgeInit mode) {
    return mode == EdgeInit::kSobel ? "sobel" : "random";
}

EdgeInit edge_init_from_name(const std::string& name) {
    if (name == "sobel") return EdgeInit::kSobel;
    if (name == "random") return EdgeInit::kRandom;
    throw std::invalid_argument("unknown edge init mode '" + name + "'");
}

EdgeParams init_edge_filters(EdgeInit mode, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("edge init: count must be >= 1");
    EdgeParams p;
    p.edge_filters.weights = Tensor({count, 1, 3, 3});
    p.edge_filters.padding = Padding::kSameZero;

    if (mode == EdgeInit::kSobel) {
        if (count != 4 && count != 8) {
            throw std::invalid_argument("edge init: sobel mode supports count 4 or 8, got " +
                                        std::to_string(count));
        }
        for (std::size_t k = 0; k < count; ++k) {
            const double sign = k < 4 ? 1.0 : -1.0;
            const auto& base = kSobel[k % 4];
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) p.edge_filters.weights(k, 0, i, j) = sign * base[i][j];
            }
        }
    } else {
        auto rng = make_rng(mix_seed(seed, "edge_filters"));
        const double a = std::sqrt(1.0 / 9.0);
        for (std::size_t k = 0; k < count; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) {
                    const double w = uniform(rng, -a, a);
                    p.edge_filters.weights(k, 0, i, j) = w;
                    mean += w;
                }
            }
            mean /= 9.0;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) p.edge_filters.weights(k, 0, i, j) -= mean;
            }
        }
    }

    p.noedge_conv.weights = Tensor({1, count, 1, 1}, -1.0 / static_cast<double>(count));
    p.noedge_conv.bias = Tensor({1}, 0.0);
    p.noedge_conv.padding = Padding::kSameZero;
    return p;
}

FeatureMaps edge_block_forward(const Tensor& plane, const EdgeParams& p) {
    if (plane.rank() != 2) {
        throw std::invalid_argument("edge block: expected a single [rows x cols] plane, got " +
                                    plane.shape_str());
    }
    const std::size_t rows = plane.dim(0);
    const std::size_t cols = plane.dim(1);
    const std::size_t b = p.edge_count();

    Tensor x({1, rows, cols});
    for (std::size_t i = 0; i < plane.size(); ++i) x[i] = plane[i];

    const Tensor edges = conv2d_forward(x, p.edge_filters);
    const Tensor noedge_z = conv2d_forward(edges, p.noedge_conv);

    FeatureMaps out;
    out.tag = Provenance::kConcatenated;
    out.values = Tensor({b + 1, rows, cols});
    for (std::size_t i = 0; i < edges.size(); ++i) out.values[i] = edges[i];
    double* noedge = out.values.data() + b * rows * cols;
    for (std::size_t i = 0; i < rows * cols; ++i) noedge[i] = sigmoid(noedge_z[i]);
    return out;
}

EdgeGrads edge_block_backward(const Tensor& plane, const EdgeParams& p, const FeatureMaps& out,
                              const Tensor& upstream) {
    if (plane.rank() != 2) {
        throw std::invalid_argument("edge block backward: expected a [rows x cols] plane, got " +
                                    plane.shape_str());
    }
    const std::size_t rows = plane.dim(0);
    const std::size_t cols = plane.dim(1);
    const std::size_t b = p.edge_count();
    if (upstream.rank() != 3 || upstream.dim(0) != b + 1 || upstream.dim(1) != rows ||
        upstream.dim(2) != cols) {
        throw std::invalid_argument("edge block backward: upstream " + upstream.shape_str() +
                                    " does not match the concatenated output");
    }
    if (!out.values.same_shape(upstream)) {
        throw std::invalid_argument("edge block backward: forward output shape mismatch");
    }

    // Recover the cached edge maps (channels 0..B-1) and sigmoid map n
    // (channel B); d sigmoid/dz = n(1-n).
    Tensor edges({b, rows, cols});
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = out.values[i];
    const double* n = out.values.data() + b * rows * cols;

    Tensor dz({1, rows, cols});
    const std::size_t plane_size = rows * cols;
    const double* g_noedge = upstream.data() + b * plane_size;
    for (std::size_t i = 0; i < plane_size; ++i) dz[i] = g_noedge[i] * n[i] * (1.0 - n[i]);

    const ConvGrads noedge_grads = conv2d_backward(edges, p.noedge_conv, dz);

    Tensor g_edges({b, rows, cols});
    for (std::size_t i = 0; i < g_edges.size(); ++i) {
        g_edges[i] = upstream[i] + noedge_grads.input[i];
    }

    Tensor x({1, rows, cols});
    for (std::size_t i = 0; i < plane.size(); ++i) x[i] = plane[i];
    const ConvGrads edge_grads = conv2d_backward(x, p.edge_filters, g_edges);

    EdgeGrads grads;
    grads.input = Tensor({rows, cols});
    for (std::size_t i = 0; i < plane_size; ++i) grads.input[i] = edge_grads.input[i];
    grads.edge_weights = edge_grads.weights;
    grads.noedge_weights = noedge_grads.weights;
    grads.noedge_bias = noedge_grads.bias;
    return grads;
}

}  // namespace nehd
