#pragma once

#include <cstddef>

#include "nehd/tensor.hpp"

namespace nehd {

enum class Padding { kSameZero, kValid };

/// Stride is fixed at (1,1); kernels must have odd spatial dims.
struct FilterBank {
    Tensor weights;  // [filters x in_channels x M x N]
    Tensor bias;     // [filters], empty when the bank has none
    Padding padding = Padding::kSameZero;

    std::size_t filters() const { return weights.dim(0); }
    std::size_t in_channels() const { return weights.dim(1); }
    std::size_t kernel_rows() const { return weights.dim(2); }
    std::size_t kernel_cols() const { return weights.dim(3); }
    bool has_bias() const { return !bias.empty(); }
};

/// Throws std::invalid_argument on even kernel dims, wrong ranks, or a bias
/// length that does not match the filter count.
void validate(const FilterBank& fb);

/// Correlation form: out(k,r,c) = sum_ci sum_mn w(k,ci,m,n) * x(ci, r+dr, c+dc)
/// with offsets centered for same-zero padding and top-left anchored for
/// valid. Input x is [in_channels x rows x cols].
Tensor conv2d_forward(const Tensor& x, const FilterBank& fb);

struct ConvGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;  // empty when the bank has none
};

ConvGrads conv2d_backward(const Tensor& x, const FilterBank& fb, const Tensor& upstream);

}  // namespace nehd
