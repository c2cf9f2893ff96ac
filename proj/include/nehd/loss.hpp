#pragma once

#include <vector>

#include "nehd/tensor.hpp"

namespace nehd {

struct LossResult {
    double loss = 0.0;
    Tensor grad_logits;  // [batch x classes], already divided by batch size
};

/// Mean cross-entropy of softmax(logits) against integer labels;
/// grad = (softmax - onehot)/batch. Throws on an out-of-range label or a
/// batch-size mismatch.
LossResult cross_entropy(const Tensor& logits, const std::vector<int>& labels);

struct RowLoss {
    double loss = 0.0;
    std::vector<double> grad;  // softmax - onehot, NOT divided by batch
};

/// Single-sample building block of cross_entropy; the caller applies the
/// 1/batch factor.
RowLoss cross_entropy_row(const double* logits, std::size_t classes, int label);

}  // namespace nehd
