#include "nehd/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace nehd {

RowLoss cross_entropy_row(const double* logits, std::size_t classes, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
        throw std::invalid_argument("cross entropy: label " + std::to_string(label) +
                                    " out of range [0, " + std::to_string(classes) + ")");
    }
    double max_logit = logits[0];
    for (std::size_t c = 1; c < classes; ++c) max_logit = std::max(max_logit, logits[c]);
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum_exp += std::exp(logits[c] - max_logit);
    const double lse = max_logit + std::log(sum_exp);

    RowLoss row;
    row.loss = lse - logits[static_cast<std::size_t>(label)];
    row.grad.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        const double softmax = std::exp(logits[c] - lse);
        row.grad[c] = softmax - (static_cast<std::size_t>(label) == c ? 1.0 : 0.0);
    }
    return row;
}

LossResult cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    if (logits.rank() != 2) {
        throw std::invalid_argument("cross entropy: logits must be [batch x classes], got " +
                                    logits.shape_str());
    }
    const std::size_t batch = logits.dim(0);
    const std::size_t classes = logits.dim(1);
    if (labels.size() != batch) {
        throw std::invalid_argument("cross entropy: " + std::to_string(labels.size()) +
                                    " labels for batch of " + std::to_string(batch));
    }

    LossResult res;
    res.grad_logits = Tensor({batch, classes});
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        const RowLoss row = cross_entropy_row(logits.data() + i * classes, classes, labels[i]);
        total += row.loss;
        for (std::size_t c = 0; c < classes; ++c) {
            res.grad_logits(i, c) = row.grad[c] / static_cast<double>(batch);
        }
    }
    res.loss = total / static_cast<double>(batch);
    return res;
}

}  // namespace nehd
