#pragma once

#include <cstdint>
#include <string>

#include "nehd/conv2d.hpp"
#include "nehd/tensor.hpp"

namespace nehd {

enum class Provenance { kEdge, kNoEdge, kConcatenated };

struct FeatureMaps {
    Tensor values;  // [channels x rows x cols]
    Provenance tag = Provenance::kConcatenated;
};

/// Edge-descriptor block: B learnable edge filters over the single input
/// plane, plus a no-edge branch (learnable 1x1 convolution over the B edge
/// maps, then a logistic threshold). Output concatenates both, B+1 channels.
struct EdgeParams {
    FilterBank edge_filters;  // [B x 1 x 3 x 3], no bias
    FilterBank noedge_conv;   // [1 x B x 1 x 1] with bias

    std::size_t edge_count() const { return edge_filters.filters(); }
};

enum class EdgeInit { kSobel, kRandom };

const char* edge_init_name(EdgeInit mode);
EdgeInit edge_init_from_name(const std::string& name);

/// Sobel mode: 3x3 kernels at 0/45/90/135 degrees (count=4) plus negated
/// polarities (count=8); every kernel sums to zero. Random mode: uniform in
/// [-a,a] with a=sqrt(1/(M*N)), mean-subtracted per kernel, any count >= 1.
/// The no-edge branch starts at weights -1/B, bias 0 in both modes.
EdgeParams init_edge_filters(EdgeInit mode, std::size_t count, std::uint64_t seed = 0);

/// plane is the [rows x cols] normalized spectrogram.
FeatureMaps edge_block_forward(const Tensor& plane, const EdgeParams& p);

struct EdgeGrads {
    Tensor input;           // [rows x cols]
    Tensor edge_weights;    // like edge_filters.weights
    Tensor noedge_weights;  // like noedge_conv.weights
    Tensor noedge_bias;     // [1]
};

/// `out` must be the forward result for (plane, p); its edge channels and
/// sigmoid channel are reused instead of being recomputed.
EdgeGrads edge_block_backward(const Tensor& plane, const EdgeParams& p, const FeatureMaps& out,
                              const Tensor& upstream);

}  // namespace nehd
